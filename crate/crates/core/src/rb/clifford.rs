use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::OnceLock;

use rand::Rng;

use crate::kernel::linalg::{self, CMatrix};
use crate::kernel::{pauli_conjugate, CliffordGate, Pauli, PauliString};
use crate::{Error, Result};

/// Images of the generators under conjugation: `images[q] = C X_q C^dag`,
/// `images[n + q] = C Z_q C^dag`, signs included.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n_qubits: usize,
    images: Vec<PauliString>,
}

impl Tableau {
    pub fn identity(n_qubits: usize) -> Self {
        let images = [Pauli::X, Pauli::Z]
            .iter()
            .flat_map(|&p| {
                (0..n_qubits).map(move |q| PauliString::single(n_qubits, q, p).expect("in range"))
            })
            .collect();
        Self { n_qubits, images }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    /// `C P C^dag`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: p.n_qubits(),
            });
        }
        let n = self.n_qubits;
        p.conjugate_with(|q, letter| match letter {
            Pauli::X => self.images[q].clone(),
            _ => self.images[n + q].clone(),
        })
    }

    /// Tableau of `self` followed by `gate`.
    pub fn then_gate(&self, gate: &CliffordGate) -> Result<Self> {
        Ok(Self {
            n_qubits: self.n_qubits,
            images: self
                .images
                .iter()
                .map(|p| pauli_conjugate(p, gate))
                .collect::<Result<_>>()?,
        })
    }

    /// Tableau of `self` followed by `next`.
    pub fn then(&self, next: &Tableau) -> Result<Self> {
        Ok(Self {
            n_qubits: self.n_qubits,
            images: self
                .images
                .iter()
                .map(|p| next.conjugate(p))
                .collect::<Result<_>>()?,
        })
    }

    /// The inverse tableau, found by pulling each generator back through `self`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n_qubits;
        let all: Vec<PauliString> = (0..4usize.pow(n as u32))
            .map(|idx| {
                let letters = (0..n)
                    .map(|q| Pauli::ALL[(idx >> (2 * (n - 1 - q))) & 3])
                    .collect();
                PauliString::new(letters, 0)
            })
            .collect();
        let identity = Self::identity(n);
        let images = identity
            .images
            .iter()
            .map(|target| {
                for q in &all {
                    let img = self.conjugate(q)?;
                    if img.letters() == target.letters() {
                        // img = i^k target with k in {0, 2} for Hermitian strings.
                        return Ok(q.clone().with_phase((4 - img.phase()) % 4));
                    }
                }
                Err(Error::Numerical("tableau is not invertible".into()))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            n_qubits: n,
            images,
        })
    }
}

/// A Clifford with its tableau, a generating word and its unitary.
#[derive(Debug, Clone)]
pub struct CliffordElement {
    pub tableau: Tableau,
    /// Generators in application order.
    pub word: Vec<CliffordGate>,
    pub unitary: CMatrix,
}

impl CliffordElement {
    pub fn n_qubits(&self) -> usize {
        self.tableau.n_qubits
    }

    pub fn cnot_count(&self) -> usize {
        self.word
            .iter()
            .filter(|g| matches!(g, CliffordGate::Cnot { .. }))
            .count()
    }
}

/// Unitary of a generator word (application order).
pub fn word_unitary(word: &[CliffordGate], n_qubits: usize) -> Result<CMatrix> {
    let mut u = linalg::identity(linalg::dim_of(n_qubits));
    for g in word {
        u = linalg::embed(&g.local_matrix(), &g.qubits(), n_qubits)? * u;
    }
    Ok(u)
}

/// The full Clifford group on one or two qubits.
#[derive(Debug)]
pub struct CliffordGroup {
    n_qubits: usize,
    elements: Vec<CliffordElement>,
    index: HashMap<Tableau, usize>,
}

fn generators(n_qubits: usize) -> Vec<CliffordGate> {
    let mut g: Vec<CliffordGate> = (0..n_qubits)
        .flat_map(|q| [CliffordGate::H(q), CliffordGate::S(q)])
        .collect();
    if n_qubits == 2 {
        g.push(CliffordGate::Cnot {
            control: 0,
            target: 1,
        });
    }
    g
}

impl CliffordGroup {
    /// Closure of `{H, S}` (and `CNOT(0->1)` on two qubits).
    ///
    /// Words are shortest with a CNOT weighing more than any run of
    /// single-qubit generators, so each element uses the fewest CNOTs.
    pub fn enumerate(n_qubits: usize) -> Result<Self> {
        if !(1..=2).contains(&n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "Clifford groups are enumerated for 1 or 2 qubits, not {n_qubits}"
            )));
        }
        const CNOT_COST: usize = 1000;
        let gens = generators(n_qubits);
        let mut found: HashMap<Tableau, (usize, Vec<CliffordGate>)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        let start = Tableau::identity(n_qubits);
        found.insert(start.clone(), (0, Vec::new()));
        // Heap entries carry an insertion counter so ordering never compares tableaux.
        let mut counter = 0usize;
        let mut pending: Vec<Tableau> = vec![start];
        heap.push(Reverse((0usize, 0usize)));
        let mut settled = HashSet::new();
        while let Some(Reverse((cost, slot))) = heap.pop() {
            let t = pending[slot].clone();
            if found[&t].0 < cost || !settled.insert(t.clone()) {
                continue;
            }
            let word = found[&t].1.clone();
            for g in &gens {
                let next = t.then_gate(g)?;
                let step = if matches!(g, CliffordGate::Cnot { .. }) {
                    CNOT_COST
                } else {
                    1
                };
                let c = cost + step;
                if found.get(&next).is_none_or(|(old, _)| c < *old) {
                    let mut w = word.clone();
                    w.push(*g);
                    found.insert(next.clone(), (c, w));
                    counter += 1;
                    pending.push(next);
                    heap.push(Reverse((c, counter)));
                }
            }
        }
        let mut entries: Vec<(Tableau, (usize, Vec<CliffordGate>))> = found.into_iter().collect();
        // Deterministic order: by cost, then by word.
        entries.sort_by(|a, b| {
            (a.1 .0, format!("{:?}", a.1 .1)).cmp(&(b.1 .0, format!("{:?}", b.1 .1)))
        });
        let mut elements = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (tableau, (_, word))) in entries.into_iter().enumerate() {
            let unitary = word_unitary(&word, n_qubits)?;
            index.insert(tableau.clone(), i);
            elements.push(CliffordElement {
                tableau,
                word,
                unitary,
            });
        }
        Ok(Self {
            n_qubits,
            elements,
            index,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &CliffordElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[CliffordElement] {
        &self.elements
    }

    pub fn index_of(&self, t: &Tableau) -> Result<usize> {
        self.index
            .get(t)
            .copied()
            .ok_or_else(|| Error::Numerical("tableau not in the enumerated group".into()))
    }

    /// Index of `a` followed by `b`.
    pub fn compose(&self, a: usize, b: usize) -> Result<usize> {
        self.index_of(&self.elements[a].tableau.then(&self.elements[b].tableau)?)
    }

    pub fn inverse(&self, a: usize) -> Result<usize> {
        self.index_of(&self.elements[a].tableau.inverse()?)
    }

    pub fn identity_index(&self) -> usize {
        self.index[&Tableau::identity(self.n_qubits)]
    }
}

/// Shared, lazily enumerated group for `n_qubits` in {1, 2}.
pub fn clifford_group(n_qubits: usize) -> Result<&'static CliffordGroup> {
    static ONE: OnceLock<CliffordGroup> = OnceLock::new();
    static TWO: OnceLock<CliffordGroup> = OnceLock::new();
    let cell = match n_qubits {
        1 => &ONE,
        2 => &TWO,
        n => {
            return Err(Error::InvalidArgument(format!(
                "Clifford groups are enumerated for 1 or 2 qubits, not {n}"
            )))
        }
    };
    if let Some(g) = cell.get() {
        return Ok(g);
    }
    let g = CliffordGroup::enumerate(n_qubits)?;
    Ok(cell.get_or_init(|| g))
}

/// Uniformly random group element; returns its index.
pub fn sample_clifford<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<usize> {
    let g = clifford_group(n_qubits)?;
    Ok(rng.random_range(0..g.len()))
}
