//! Dense statevector engine.
//!
//! Gate application, Pauli expectations, exact state Jacobians with respect
//! to circuit parameters, subsystem entropy, and seeded bitstring sampling.
//!
//! Convention: qubit 0 is the most significant bit of the basis index, so the
//! basis state `|q0 q1 ... q_{n-1}>` has index `q0*2^{n-1} + ... + q_{n-1}`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Hard cap on register width; 2^24 amplitudes is already 256 MiB.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// A weighted tensor product of single-qubit Paulis on distinct qubits.
///
/// The coefficient is real, so every `PauliString` is Hermitian and its
/// expectation values are real.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    factors: Vec<(usize, Pauli)>,
    coeff: f64,
}

impl PauliString {
    /// Build from (qubit, axis) factors; factors are sorted by qubit index.
    pub fn new(mut factors: Vec<(usize, Pauli)>, coeff: f64) -> Result<Self> {
        factors.sort_by_key(|&(q, _)| q);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Argument(
                "pauli string has repeated qubit index".into(),
            ));
        }
        Ok(Self { factors, coeff })
    }

    pub fn z(qubit: usize) -> Self {
        Self { factors: vec![(qubit, Pauli::Z)], coeff: 1.0 }
    }

    pub fn x(qubit: usize) -> Self {
        Self { factors: vec![(qubit, Pauli::X)], coeff: 1.0 }
    }

    pub fn y(qubit: usize) -> Self {
        Self { factors: vec![(qubit, Pauli::Y)], coeff: 1.0 }
    }

    pub fn zz(a: usize, b: usize) -> Self {
        Self::new(vec![(a, Pauli::Z), (b, Pauli::Z)], 1.0).expect("distinct qubits")
    }

    pub fn with_coeff(mut self, coeff: f64) -> Self {
        self.coeff = coeff;
        self
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.last().map(|&(q, _)| q)
    }

    fn is_diagonal(&self) -> bool {
        self.factors.iter().all(|&(_, p)| p == Pauli::Z)
    }
}

/// Rotation generator of a circuit gate: a single Pauli or a two-qubit Z⊗Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Single(usize, Pauli),
    ZZ(usize, usize),
}

impl Generator {
    pub fn support(&self) -> (usize, Option<usize>) {
        match *self {
            Generator::Single(q, _) => (q, None),
            Generator::ZZ(a, b) => (a, Some(b)),
        }
    }

    fn max_qubit(&self) -> usize {
        match *self {
            Generator::Single(q, _) => q,
            Generator::ZZ(a, b) => a.max(b),
        }
    }
}

/// One circuit element: `exp(-i θ P)` when `param_slot` is set, else the
/// fixed Pauli operator `P` itself (used for initial-state X flips).
#[derive(Clone, Copy, Debug)]
pub struct Gate {
    pub generator: Generator,
    pub param_slot: Option<usize>,
}

/// An ordered gate list with a parameter-slot map.
#[derive(Clone, Debug)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    param_count: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), param_count: 0 }
    }

    /// Append a parameterized rotation `exp(-i θ P)`; returns its slot index.
    pub fn push_rotation(&mut self, generator: Generator) -> Result<usize> {
        self.check_support(&generator)?;
        let slot = self.param_count;
        self.gates.push(Gate { generator, param_slot: Some(slot) });
        self.param_count += 1;
        Ok(slot)
    }

    /// Append an unparameterized Pauli gate (excluded from Jacobians).
    pub fn push_fixed(&mut self, generator: Generator) -> Result<()> {
        self.check_support(&generator)?;
        self.gates.push(Gate { generator, param_slot: None });
        Ok(())
    }

    fn check_support(&self, generator: &Generator) -> Result<()> {
        if let Generator::ZZ(a, b) = *generator {
            if a == b {
                return Err(Error::Argument("ZZ gate with a == b".into()));
            }
        }
        if generator.max_qubit() >= self.n_qubits {
            return Err(Error::Shape(format!(
                "gate support {} out of range for {} qubits",
                generator.max_qubit(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Apply the circuit to `input`, returning `U(θ)|input>`.
    pub fn apply(&self, input: &Statevector, params: &[f64]) -> Result<Statevector> {
        let mut state = input.clone();
        self.apply_in_place(&mut state, params)?;
        Ok(state)
    }

    pub fn apply_in_place(&self, state: &mut Statevector, params: &[f64]) -> Result<()> {
        if state.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!(
                "state has {} qubits, circuit has {}",
                state.n_qubits, self.n_qubits
            )));
        }
        if params.len() != self.param_count {
            return Err(Error::Shape(format!(
                "got {} parameters, circuit needs {}",
                params.len(),
                self.param_count
            )));
        }
        for gate in &self.gates {
            apply_gate(&mut state.amps, self.n_qubits, gate, params);
        }
        Ok(())
    }
}

/// Normalized complex amplitude vector over the 2^n computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n` qubits. Errors if `n` is outside `1..=cap`.
    pub fn zero_with_cap(n: usize, cap: usize) -> Result<Self> {
        if n < 1 || n > cap {
            return Err(Error::Capacity(format!(
                "n_qubits {n} outside supported range 1..={cap}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// `|0...0>` with the default 24-qubit cap.
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_cap(n, DEFAULT_QUBIT_CAP)
    }

    /// Wrap raw amplitudes; the length must be a power of two matching `n`.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n < 1 || amps.len() != 1 << n {
            return Err(Error::Shape(format!(
                "amplitude vector of length {} does not match {} qubits",
                amps.len(),
                n
            )));
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Value of `qubit` in basis-state `index` under the MSB-first convention.
    pub fn bit(index: u64, qubit: usize, n_qubits: usize) -> u64 {
        (index >> (n_qubits - 1 - qubit)) & 1
    }
}

fn stride(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

fn apply_gate(amps: &mut [Complex64], n: usize, gate: &Gate, params: &[f64]) {
    match gate.param_slot {
        Some(slot) => {
            let theta = params[slot];
            match gate.generator {
                Generator::Single(q, axis) => apply_single_rotation(amps, n, q, axis, theta),
                Generator::ZZ(a, b) => apply_zz_rotation(amps, n, a, b, theta),
            }
        }
        None => match gate.generator {
            Generator::Single(q, axis) => apply_fixed_pauli(amps, n, q, axis),
            Generator::ZZ(a, b) => {
                // Z⊗Z as a fixed gate is a diagonal sign flip.
                apply_zz_sign(amps, n, a, b);
            }
        },
    }
}

/// `exp(-i θ P)` for a single-qubit Pauli `P`.
fn apply_single_rotation(amps: &mut [Complex64], n: usize, q: usize, axis: Pauli, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let s1 = stride(n, q);
    match axis {
        Pauli::X => for_each_pair(amps, s1, |a0, a1| {
            let (x0, x1) = (*a0, *a1);
            *a0 = c * x0 - Complex64::new(0.0, s) * x1;
            *a1 = c * x1 - Complex64::new(0.0, s) * x0;
        }),
        Pauli::Y => for_each_pair(amps, s1, |a0, a1| {
            let (x0, x1) = (*a0, *a1);
            *a0 = c * x0 - s * x1;
            *a1 = s * x0 + c * x1;
        }),
        Pauli::Z => {
            let ph0 = Complex64::new(c, -s);
            let ph1 = Complex64::new(c, s);
            for_each_pair(amps, s1, |a0, a1| {
                *a0 *= ph0;
                *a1 *= ph1;
            });
        }
    }
}

/// `exp(-i θ Z⊗Z)`: phase `e^{-iθ}` on aligned bits, `e^{+iθ}` otherwise.
fn apply_zz_rotation(amps: &mut [Complex64], n: usize, qa: usize, qb: usize, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let aligned = Complex64::new(c, -s);
    let anti = Complex64::new(c, s);
    let (sa, sb) = (stride(n, qa), stride(n, qb));
    for (i, a) in amps.iter_mut().enumerate() {
        let same = ((i / sa) & 1) == ((i / sb) & 1);
        *a *= if same { aligned } else { anti };
    }
}

fn apply_zz_sign(amps: &mut [Complex64], n: usize, qa: usize, qb: usize) {
    let (sa, sb) = (stride(n, qa), stride(n, qb));
    for (i, a) in amps.iter_mut().enumerate() {
        if ((i / sa) & 1) != ((i / sb) & 1) {
            *a = -*a;
        }
    }
}

/// Apply the bare Pauli operator on one qubit.
fn apply_fixed_pauli(amps: &mut [Complex64], n: usize, q: usize, axis: Pauli) {
    let s1 = stride(n, q);
    match axis {
        Pauli::X => for_each_pair(amps, s1, |a0, a1| std::mem::swap(a0, a1)),
        Pauli::Y => for_each_pair(amps, s1, |a0, a1| {
            // Y|0> = i|1>, Y|1> = -i|0>
            let (x0, x1) = (*a0, *a1);
            *a0 = Complex64::new(0.0, -1.0) * x1;
            *a1 = Complex64::new(0.0, 1.0) * x0;
        }),
        Pauli::Z => for_each_pair(amps, s1, |_, a1| {
            *a1 = -*a1;
        }),
    }
}

/// Visit each `(|..0_q..>, |..1_q..>)` amplitude pair for a qubit of stride `s`.
#[inline]
fn for_each_pair<F: FnMut(&mut Complex64, &mut Complex64)>(
    amps: &mut [Complex64],
    s: usize,
    mut f: F,
) {
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        let (lo, hi) = amps[base..base + 2 * s].split_at_mut(s);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a0, a1);
        }
        base += 2 * s;
    }
}

/// `out += coeff * P |in>` for an arbitrary Pauli string.
pub(crate) fn accumulate_pauli(
    string: &PauliString,
    input: &[Complex64],
    n: usize,
    out: &mut [Complex64],
) {
    if string.is_diagonal() {
        // Diagonal strings only contribute signs.
        let strides: Vec<usize> = string.factors.iter().map(|&(q, _)| stride(n, q)).collect();
        for (i, (o, a)) in out.iter_mut().zip(input.iter()).enumerate() {
            let mut sign = string.coeff;
            for &s in &strides {
                if (i / s) & 1 == 1 {
                    sign = -sign;
                }
            }
            *o += sign * a;
        }
        return;
    }
    let mut flip = 0usize;
    for &(q, p) in &string.factors {
        if matches!(p, Pauli::X | Pauli::Y) {
            flip |= stride(n, q);
        }
    }
    for (i, a) in input.iter().enumerate() {
        let mut phase = Complex64::new(string.coeff, 0.0);
        for &(q, p) in &string.factors {
            let bit = (i / stride(n, q)) & 1;
            match p {
                Pauli::X => {}
                Pauli::Y => {
                    phase *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    }
                }
                Pauli::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        out[i ^ flip] += phase * a;
    }
}

/// `<ψ|P|ψ>`, checked real to 1e-12 with the imaginary residue discarded.
pub fn expect_pauli(state: &Statevector, obs: &PauliString) -> Result<f64> {
    if let Some(q) = obs.max_qubit() {
        if q >= state.n_qubits {
            return Err(Error::Shape(format!(
                "observable touches qubit {q} of a {}-qubit state",
                state.n_qubits
            )));
        }
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); state.dim()];
    accumulate_pauli(obs, &state.amps, state.n_qubits, &mut scratch);
    let val: Complex64 = state
        .amps
        .iter()
        .zip(&scratch)
        .map(|(a, b)| a.conj() * b)
        .sum();
    debug_assert!(
        val.im.abs() <= 1e-12,
        "hermitian expectation has imaginary residue {}",
        val.im
    );
    Ok(val.re)
}

/// `<Z_q>` for every qubit in one pass over the amplitudes.
pub fn all_z_expectations(state: &Statevector) -> Vec<f64> {
    let n = state.n_qubits;
    let mut z = vec![0.0f64; n];
    for (i, a) in state.amps.iter().enumerate() {
        let p = a.norm_sqr();
        for (q, zq) in z.iter_mut().enumerate() {
            if (i >> (n - 1 - q)) & 1 == 0 {
                *zq += p;
            } else {
                *zq -= p;
            }
        }
    }
    z
}

/// Columns `∂|φ(θ)>/∂θ_j` of a circuit state, stored contiguously.
pub struct StateJacobian {
    dim: usize,
    n_params: usize,
    data: Vec<Complex64>,
}

impl StateJacobian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }
}

/// Exact Jacobian of `U(θ)|input>` with respect to every parameter slot.
///
/// Column j is built by inserting `-i P_j` after gate j and completing the
/// remaining gates, so no finite differences are involved. A forward sweep
/// snapshots the prefix state at each parameterized gate; the suffix of each
/// column is then finished independently (and in parallel), which keeps each
/// 2^N-sized column cache-resident instead of streaming the whole column set
/// once per gate.
pub fn state_jacobian(
    circuit: &Circuit,
    params: &[f64],
    input: &Statevector,
) -> Result<StateJacobian> {
    if input.n_qubits != circuit.n_qubits {
        return Err(Error::Shape(format!(
            "state has {} qubits, circuit has {}",
            input.n_qubits, circuit.n_qubits
        )));
    }
    if params.len() != circuit.param_count {
        return Err(Error::Shape(format!(
            "got {} parameters, circuit needs {}",
            params.len(),
            circuit.param_count
        )));
    }
    let dim = input.dim();
    let p = circuit.param_count;
    let n = circuit.n_qubits;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * p];
    if p == 0 {
        return Ok(StateJacobian { dim, n_params: p, data });
    }

    // Forward sweep: snapshot the state right after each parameterized gate.
    let mut psi = input.amps.clone();
    let mut tail_start = vec![0usize; p];
    for (k, gate) in circuit.gates.iter().enumerate() {
        apply_gate(&mut psi, n, gate, params);
        if let Some(slot) = gate.param_slot {
            data[slot * dim..(slot + 1) * dim].copy_from_slice(&psi);
            tail_start[slot] = k + 1;
        }
    }

    // Per-column completion: -i P_j, then the remaining gates.
    data.par_chunks_mut(dim)
        .enumerate()
        .for_each(|(slot, col)| {
            let gate = circuit
                .gates
                .iter()
                .find(|g| g.param_slot == Some(slot))
                .expect("slot exists");
            apply_neg_i_generator(col, n, gate.generator);
            for g in &circuit.gates[tail_start[slot]..] {
                apply_gate(col, n, g, params);
            }
        });

    Ok(StateJacobian { dim, n_params: p, data })
}

/// In-place `-i P` for a rotation generator.
fn apply_neg_i_generator(amps: &mut [Complex64], n: usize, generator: Generator) {
    match generator {
        Generator::Single(q, axis) => {
            let s1 = stride(n, q);
            match axis {
                Pauli::X => for_each_pair(amps, s1, |a0, a1| {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = Complex64::new(0.0, -1.0) * x1;
                    *a1 = Complex64::new(0.0, -1.0) * x0;
                }),
                Pauli::Y => for_each_pair(amps, s1, |a0, a1| {
                    // -iY = [[0,-1],[1,0]]
                    let (x0, x1) = (*a0, *a1);
                    *a0 = -x1;
                    *a1 = x0;
                }),
                Pauli::Z => for_each_pair(amps, s1, |a0, a1| {
                    *a0 *= Complex64::new(0.0, -1.0);
                    *a1 *= Complex64::new(0.0, 1.0);
                }),
            }
        }
        Generator::ZZ(a, b) => {
            let (sa, sb) = (stride(n, a), stride(n, b));
            for (i, amp) in amps.iter_mut().enumerate() {
                let same = ((i / sa) & 1) == ((i / sb) & 1);
                *amp *= if same {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::new(0.0, 1.0)
                };
            }
        }
    }
}

/// Von Neumann entropy (natural log) of the reduced state on qubits `[0, cut)`.
pub fn reduced_entropy(state: &Statevector, cut: usize) -> Result<f64> {
    let n = state.n_qubits;
    if cut < 1 || cut >= n {
        return Err(Error::Shape(format!(
            "cut {cut} outside 1..{n} for a {n}-qubit state"
        )));
    }
    let rows = 1usize << cut;
    let cols = 1usize << (n - cut);
    // Qubits [0, cut) are the high bits, so rows are contiguous blocks.
    let mut rho = nalgebra::DMatrix::<Complex64>::zeros(rows, rows);
    for r in 0..rows {
        for rp in r..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..cols {
                acc += state.amps[r * cols + c] * state.amps[rp * cols + c].conj();
            }
            rho[(r, rp)] = acc;
            rho[(rp, r)] = acc.conj();
        }
    }
    let eig = rho.symmetric_eigen();
    let mut s = 0.0;
    for &lambda in eig.eigenvalues.iter() {
        // Round-off can push eigenvalues slightly negative.
        if lambda > 1e-12 {
            s -= lambda * lambda.ln();
        }
    }
    Ok(s)
}

/// Counts table from measuring a state in the computational basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    shots: u64,
    map: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn from_map(n_qubits: usize, map: BTreeMap<u64, u64>) -> Self {
        let shots = map.values().sum();
        Self { n_qubits, shots, map }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, index: u64) -> u64 {
        self.map.get(&index).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &u64)> {
        self.map.iter()
    }

    /// Empirical frequency of reading `bit` on `qubit`.
    pub fn bit_frequency(&self, qubit: usize, bit: u64) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        let hits: u64 = self
            .map
            .iter()
            .filter(|(&idx, _)| Statevector::bit(idx, qubit, self.n_qubits) == bit)
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.shots as f64
    }

    /// Unmitigated `<Z_qubit>` estimate: p0 - p1.
    pub fn z_estimate(&self, qubit: usize) -> f64 {
        self.bit_frequency(qubit, 0) - self.bit_frequency(qubit, 1)
    }
}

/// Multinomial sample of measurement outcomes; deterministic per seed.
pub fn sample_bitstrings(state: &Statevector, shots: u64, seed: u64) -> Result<Counts> {
    if shots < 1 {
        return Err(Error::Argument("shots must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_bitstrings_with(state, shots, &mut rng))
}

/// Sampling core reused by the noise emulator with an externally owned RNG.
pub(crate) fn sample_bitstrings_with(
    state: &Statevector,
    shots: u64,
    rng: &mut impl Rng,
) -> Counts {
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0f64;
    for a in &state.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut map = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(state.dim() - 1);
        *map.entry(idx as u64).or_insert(0) += 1;
    }
    Counts { n_qubits: state.n_qubits, shots, map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_state_is_basis_zero() {
        let s = Statevector::zero(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = Statevector::zero(2).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn zero_state_rejects_out_of_cap() {
        assert!(matches!(Statevector::zero(25), Err(Error::Capacity(_))));
        assert!(matches!(Statevector::zero(0), Err(Error::Capacity(_))));
    }

    #[test]
    fn fixed_x_flips_msb() {
        let mut circ = Circuit::new(2);
        circ.push_fixed(Generator::Single(0, Pauli::X)).unwrap();
        let out = circ.apply(&Statevector::zero(2).unwrap(), &[]).unwrap();
        // |00> -> |10>, i.e. index 2 under the MSB-first convention.
        assert_abs_diff_eq!(out.amplitudes()[2].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ry_rotation_matches_2x2_algebra() {
        // e^{-iθY}|0> = cosθ|0> + sinθ|1>
        let mut circ = Circuit::new(1);
        circ.push_rotation(Generator::Single(0, Pauli::Y)).unwrap();
        let theta = std::f64::consts::FRAC_PI_4;
        let out = circ.apply(&Statevector::zero(1).unwrap(), &[theta]).unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].re, theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitudes()[1].re, theta.sin(), epsilon = 1e-14);
        let z = expect_pauli(&out, &PauliString::z(0)).unwrap();
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn expect_z_on_eigenstates() {
        let s = Statevector::zero(3).unwrap();
        assert_abs_diff_eq!(expect_pauli(&s, &PauliString::z(0)).unwrap(), 1.0);
        let mut circ = Circuit::new(1);
        circ.push_fixed(Generator::Single(0, Pauli::X)).unwrap();
        let flipped = circ.apply(&Statevector::zero(1).unwrap(), &[]).unwrap();
        assert_abs_diff_eq!(expect_pauli(&flipped, &PauliString::z(0)).unwrap(), -1.0);
    }

    #[test]
    fn expect_z_after_ry_is_cos_two_theta() {
        let theta = std::f64::consts::PI / 8.0;
        let mut circ = Circuit::new(1);
        circ.push_rotation(Generator::Single(0, Pauli::Y)).unwrap();
        let out = circ.apply(&Statevector::zero(1).unwrap(), &[theta]).unwrap();
        let z = expect_pauli(&out, &PauliString::z(0)).unwrap();
        assert_abs_diff_eq!(z, (2.0 * theta).cos(), epsilon = 1e-14);
    }

    #[test]
    fn expect_rejects_out_of_range_support() {
        let s = Statevector::zero(2).unwrap();
        assert!(matches!(
            expect_pauli(&s, &PauliString::z(2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn single_gate_jacobian_has_unit_norm() {
        let mut circ = Circuit::new(1);
        circ.push_rotation(Generator::Single(0, Pauli::X)).unwrap();
        let jac = state_jacobian(&circ, &[0.3], &Statevector::zero(1).unwrap()).unwrap();
        let norm: f64 = jac.column(0).iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-13);
        // Column should equal -iX e^{-iθX}|0>.
        let theta: f64 = 0.3;
        let expected = [
            c(0.0, -1.0) * c(0.0, -theta.sin()),
            c(0.0, -1.0) * c(theta.cos(), 0.0),
        ];
        for (got, want) in jac.column(0).iter().zip(expected.iter()) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_parameter_circuit_yields_empty_jacobian() {
        let mut circ = Circuit::new(2);
        circ.push_fixed(Generator::Single(1, Pauli::X)).unwrap();
        let jac = state_jacobian(&circ, &[], &Statevector::zero(2).unwrap()).unwrap();
        assert_eq!(jac.n_params(), 0);
        assert_eq!(jac.dim(), 4);
    }

    #[test]
    fn jacobian_matches_central_finite_differences() {
        let circ = test_circuit(3);
        let params: Vec<f64> = (0..circ.param_count())
            .map(|i| 0.3 * (i as f64 + 1.0).sin())
            .collect();
        let input = Statevector::zero(3).unwrap();
        let jac = state_jacobian(&circ, &params, &input).unwrap();
        let h = 1e-5;
        for j in 0..circ.param_count() {
            let mut plus = params.clone();
            plus[j] += h;
            let mut minus = params.clone();
            minus[j] -= h;
            let sp = circ.apply(&input, &plus).unwrap();
            let sm = circ.apply(&input, &minus).unwrap();
            for (i, col) in jac.column(j).iter().enumerate() {
                let fd = (sp.amplitudes()[i] - sm.amplitudes()[i]) / (2.0 * h);
                assert!(
                    (col - fd).norm() <= 1e-6,
                    "param {j} amp {i}: analytic {col}, fd {fd}"
                );
            }
        }
    }

    /// Small mixed circuit covering every gate kind.
    fn test_circuit(n: usize) -> Circuit {
        let mut circ = Circuit::new(n);
        circ.push_fixed(Generator::Single(n - 1, Pauli::X)).unwrap();
        for q in 0..n {
            circ.push_rotation(Generator::Single(q, Pauli::X)).unwrap();
        }
        for q in 0..n - 1 {
            circ.push_rotation(Generator::ZZ(q, q + 1)).unwrap();
        }
        for q in 0..n {
            circ.push_rotation(Generator::Single(q, Pauli::Z)).unwrap();
            circ.push_rotation(Generator::Single(q, Pauli::Y)).unwrap();
        }
        circ
    }

    #[test]
    fn norm_preserved_and_gate_inverses_recover_input() {
        let circ = test_circuit(4);
        let params: Vec<f64> = (0..circ.param_count())
            .map(|i| (i as f64 * 0.77).cos())
            .collect();
        let input = Statevector::zero(4).unwrap();
        let out = circ.apply(&input, &params).unwrap();
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-10);

        // Undo gate-by-gate with negated angles.
        let mut back = out.clone();
        for gate in circ.gates().iter().rev() {
            match gate.param_slot {
                Some(slot) => {
                    let mut undo = Circuit::new(4);
                    undo.push_rotation(gate.generator).unwrap();
                    undo.apply_in_place(&mut back, &[-params[slot]]).unwrap();
                }
                None => {
                    let mut undo = Circuit::new(4);
                    undo.push_fixed(gate.generator).unwrap();
                    undo.apply_in_place(&mut back, &[]).unwrap();
                }
            }
        }
        let overlap = back.inner(&input);
        assert_abs_diff_eq!((overlap - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_of_product_state_is_zero() {
        let circ = {
            let mut circ = Circuit::new(4);
            for q in 0..4 {
                circ.push_rotation(Generator::Single(q, Pauli::Y)).unwrap();
            }
            circ
        };
        let out = circ
            .apply(&Statevector::zero(4).unwrap(), &[0.2, 0.4, 0.6, 0.8])
            .unwrap();
        for cut in 1..4 {
            assert_abs_diff_eq!(reduced_entropy(&out, cut).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bell_pair_entropy_is_ln2() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Statevector::from_amplitudes(
            2,
            vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(
            reduced_entropy(&bell, 1).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn entropy_respects_dimension_bound() {
        let circ = test_circuit(5);
        let params: Vec<f64> = (0..circ.param_count())
            .map(|i| (i as f64 + 0.3).sin())
            .collect();
        let out = circ.apply(&Statevector::zero(5).unwrap(), &params).unwrap();
        for cut in 1..5 {
            let s = reduced_entropy(&out, cut).unwrap();
            let bound = (cut.min(5 - cut) as f64) * std::f64::consts::LN_2;
            assert!(s >= -1e-12 && s <= bound + 1e-9, "cut {cut}: {s} vs {bound}");
        }
        assert!(reduced_entropy(&out, 0).is_err());
        assert!(reduced_entropy(&out, 5).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_concentrated() {
        let s = Statevector::zero(3).unwrap();
        let a = sample_bitstrings(&s, 1000, 42).unwrap();
        assert_eq!(a.get(0), 1000);
        let b = sample_bitstrings(&s, 1000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_uniform_superposition_within_binomial_band() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Statevector::from_amplitudes(1, vec![c(inv, 0.0), c(inv, 0.0)]).unwrap();
        let shots = 100_000u64;
        let counts = sample_bitstrings(&plus, shots, 7).unwrap();
        let p0 = counts.bit_frequency(0, 0);
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((p0 - 0.5).abs() < 5.0 * sigma, "p0 = {p0}");
    }

    #[test]
    fn all_z_matches_expect_pauli() {
        let circ = test_circuit(3);
        let params: Vec<f64> = (0..circ.param_count()).map(|i| 0.21 * i as f64).collect();
        let out = circ.apply(&Statevector::zero(3).unwrap(), &params).unwrap();
        let z = all_z_expectations(&out);
        for q in 0..3 {
            let direct = expect_pauli(&out, &PauliString::z(q)).unwrap();
            assert_abs_diff_eq!(z[q], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn pauli_string_rejects_repeated_qubits() {
        assert!(PauliString::new(vec![(0, Pauli::X), (0, Pauli::Z)], 1.0).is_err());
    }
}
