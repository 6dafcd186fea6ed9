//! Diagonal unitaries `e^{2πi f(x)}` from the parity expansion
//! `f(x) = c + Σ_y α_y (y·x mod 2)`.
//!
//! A term on support `s` is an `RZ(2πα)` on one anchor qubit of `s`, between
//! two CZ fans from the rest of `s` onto the anchor, each fan wrapped in H on
//! the anchor. Terms with disjoint supports share their fans. Layers that
//! keep the same anchors run back to back, so the H pairs between them cancel
//! and so do the fan pairs they have in common.
//!
//! Supports are bitsets with bit `q` for qubit `q`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{qbit, simulate_state, support_cost, Angle, Circuit, DiagonalPhases, Gate, C64};
use crate::cliffordpass::compile_cz_layer;
use crate::{Error, HollowSymmetric, Result};

/// Largest qubit count for a phase table.
pub const POLY_CAP: usize = 16;

fn qubits_of(s: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |q| (s >> q) & 1 == 1)
}

fn size(s: u64) -> usize {
    s.count_ones() as usize
}

/// Basis index to qubit bitset.
fn index_to_mask(x: usize, n: usize) -> u64 {
    (0..n).fold(0, |m, q| m | ((qbit(x, n, q) as u64) << q))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRecord", into = "PolyRecord")]
pub struct PhasePolynomial {
    n: usize,
    /// `(support, α)` sorted by support, no zero support.
    terms: Vec<(u64, f64)>,
    global: f64,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    /// 1-based.
    qubits: Vec<usize>,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRecord {
    n: usize,
    #[serde(default)]
    global: f64,
    terms: Vec<TermRecord>,
}

impl TryFrom<PolyRecord> for PhasePolynomial {
    type Error = Error;

    fn try_from(r: PolyRecord) -> Result<Self> {
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in r.terms {
            let mut s = 0u64;
            for q in t.qubits {
                if q == 0 || q > r.n {
                    return Err(Error::InvalidInput(format!("qubit {q} outside 1..={}", r.n)));
                }
                s |= 1 << (q - 1);
            }
            terms.push((s, t.alpha));
        }
        Self::new(r.n, r.global, terms)
    }
}

impl From<PhasePolynomial> for PolyRecord {
    fn from(p: PhasePolynomial) -> Self {
        PolyRecord {
            n: p.n,
            global: p.global,
            terms: p
                .terms
                .iter()
                .map(|&(s, alpha)| TermRecord { qubits: qubits_of(s).map(|q| q + 1).collect(), alpha })
                .collect(),
        }
    }
}

impl PhasePolynomial {
    /// Repeated supports are summed.
    pub fn new(n: usize, global: f64, terms: Vec<(u64, f64)>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidInput(format!("bad qubit count {n}")));
        }
        let mut merged: std::collections::BTreeMap<u64, f64> = Default::default();
        for (s, a) in terms {
            if s == 0 || s >> n != 0 {
                return Err(Error::InvalidInput(format!("support {s:#b} is empty or outside {n} qubits")));
            }
            *merged.entry(s).or_insert(0.0) += a;
        }
        Ok(Self { n, terms: merged.into_iter().collect(), global })
    }

    /// Terms given as 0-based qubit lists.
    pub fn from_supports(n: usize, terms: &[(Vec<usize>, f64)]) -> Result<Self> {
        let t = terms.iter().map(|(qs, a)| (qs.iter().fold(0u64, |m, &q| m | (1 << q)), *a)).collect();
        Self::new(n, 0.0, t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(u64, f64)] {
        &self.terms
    }

    pub fn global(&self) -> f64 {
        self.global
    }

    /// `f` at basis index `x`.
    pub fn evaluate(&self, x: usize) -> f64 {
        let m = index_to_mask(x, self.n);
        self.global + self.terms.iter().filter(|(s, _)| (s & m).count_ones() % 2 == 1).map(|(_, a)| a).sum::<f64>()
    }

    pub fn table(&self) -> Vec<f64> {
        (0..1usize << self.n).map(|x| self.evaluate(x)).collect()
    }

    /// Phases `2π f(x)`.
    pub fn phases(&self) -> DiagonalPhases {
        DiagonalPhases { n: self.n, phases: self.table().iter().map(|f| 2.0 * PI * f).collect() }
    }
}

/// Parity expansion of a table of `2ⁿ` values by the Walsh transform:
/// `α_y = −2 f̂_y` and the constant is `f(0)`. Coefficients below `1e−12`
/// are dropped.
pub fn phase_poly_from_table(f: &[f64]) -> Result<PhasePolynomial> {
    let len = f.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidInput(format!("table length {len} is not a power of two >= 2")));
    }
    let n = len.trailing_zeros() as usize;
    if n > POLY_CAP {
        return Err(Error::CapExceeded { n, cap: POLY_CAP });
    }
    if let Some(v) = f.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite table entry {v}")));
    }
    let mut h = f.to_vec();
    let mut step = 1;
    while step < len {
        for block in (0..len).step_by(2 * step) {
            for i in block..block + step {
                let (a, b) = (h[i], h[i + step]);
                h[i] = a + b;
                h[i + step] = a - b;
            }
        }
        step *= 2;
    }
    let terms =
        (1..len).map(|y| (index_to_mask(y, n), -2.0 * h[y] / len as f64)).filter(|(_, a)| a.abs() >= 1e-12).collect();
    PhasePolynomial::new(n, f[0], terms)
}

fn check_support(n: usize, s: u64) -> Result<()> {
    if s == 0 || (n < 64 && s >> n != 0) {
        return Err(Error::InvalidInput(format!("support {s:#b} is empty or outside {n} qubits")));
    }
    Ok(())
}

/// One term `e^{2πiα (y·x mod 2)}` in H-conjugated CZ-fan form.
pub fn term_circuit(n: usize, support: u64, alpha: f64, anchor: usize) -> Result<Circuit> {
    check_support(n, support)?;
    if anchor >= n || (support >> anchor) & 1 == 0 {
        return Err(Error::InvalidInput(format!("anchor {} is not in the support", anchor + 1)));
    }
    let mut c = Circuit::new(n);
    let fan = |c: &mut Circuit| {
        c.add(Gate::H(anchor));
        for l in qubits_of(support).filter(|&l| l != anchor) {
            c.add(Gate::CZ(l, anchor));
        }
        c.add(Gate::H(anchor));
    };
    fan(&mut c);
    c.add(Gate::RZ(Angle::Rad(2.0 * PI * alpha), anchor));
    fan(&mut c);
    Ok(c)
}

/// Greedy partition into layers of disjoint supports. Each layer starts from
/// the largest unplaced support (ties by sorted qubit list) and repeatedly
/// adds the disjoint support that covers the most qubits, earliest first on
/// ties. Supports below three qubits need `allow_pairs`.
pub fn parallelize_supports(supports: &[u64], allow_pairs: bool) -> Result<Vec<Vec<usize>>> {
    let min = if allow_pairs { 2 } else { 3 };
    if let Some(s) = supports.iter().find(|&&s| size(s) < min) {
        return Err(Error::InvalidInput(format!("support {s:#b} has fewer than {min} qubits")));
    }
    let mut left: Vec<usize> = (0..supports.len()).collect();
    let mut layers = Vec::new();
    while !left.is_empty() {
        let pos = (0..left.len())
            .min_by_key(|&p| {
                let s = supports[left[p]];
                (std::cmp::Reverse(size(s)), qubits_of(s).collect::<Vec<_>>())
            })
            .expect("nonempty");
        let seed = left.remove(pos);
        let mut layer = vec![seed];
        let mut covered = supports[seed];
        loop {
            let best = left.iter().enumerate().filter(|(_, &k)| supports[k] & covered == 0).fold(
                None,
                |best: Option<(usize, usize)>, (pos, &k)| {
                    let gain = size(supports[k]);
                    match best {
                        Some((_, g)) if g >= gain => best,
                        _ => Some((pos, gain)),
                    }
                },
            );
            let Some((pos, _)) = best else { break };
            let k = left.remove(pos);
            covered |= supports[k];
            layer.push(k);
        }
        layers.push(layer);
    }
    Ok(layers)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HadamardPlacement {
    /// `layers[k][i]`: support of chain `i` in layer `k`, with its ancilla bit.
    pub layers: Vec<Vec<u64>>,
    /// `slots[k][i]`: position in input layer `k` of the support in chain `i`.
    pub slots: Vec<Vec<usize>>,
    /// Anchor qubit per chain. Ancillas are numbered from `n`.
    pub anchors: Vec<usize>,
    pub ancillas: usize,
    pub hadamards: usize,
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(r - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, r - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// (chains kept nonempty, overlap) of putting `layer[p[i]]` in chain `i`.
fn matching_score(inter: &[Option<u64>], layer: &[u64], p: &[usize]) -> (usize, usize) {
    inter.iter().zip(p).fold((0, 0), |(kept, ov), (m, &k)| match m {
        Some(m) => (kept + (m & layer[k] != 0) as usize, ov + size(m & layer[k])),
        None => (kept + 1, ov),
    })
}

fn best_matching(inter: &[Option<u64>], layer: &[u64], perms: &[Vec<usize>]) -> Vec<usize> {
    if !perms.is_empty() {
        let mut best = perms[0].clone();
        let mut score = matching_score(inter, layer, &best);
        for p in &perms[1..] {
            let s = matching_score(inter, layer, p);
            if s > score {
                score = s;
                best = p.clone();
            }
        }
        return best;
    }
    // Greedy, chain by chain.
    let mut used = vec![false; layer.len()];
    let mut p = Vec::with_capacity(layer.len());
    for m in inter {
        let k = (0..layer.len())
            .filter(|&k| !used[k])
            .max_by_key(|&k| {
                let ov = m.map_or(0, |m| size(m & layer[k]));
                (std::cmp::Reverse((ov == 0) as usize), ov, std::cmp::Reverse(k))
            })
            .expect("a support is left");
        used[k] = true;
        p.push(k);
    }
    p
}

/// Assign each layer's supports to chains and pick one anchor per chain from
/// the chain's common qubits. A chain with no common qubit gets an ancilla
/// added to all of its supports.
pub fn place_hadamards(layers: &[Vec<u64>], n: usize) -> Result<HadamardPlacement> {
    place_with_preference(layers, n, &[])
}

/// As `place_hadamards`, preferring anchors listed in `prefer` as
/// `(anchor, neighbouring support)`, ranked by overlap with that support.
fn place_with_preference(layers: &[Vec<u64>], n: usize, prefer: &[(usize, u64)]) -> Result<HadamardPlacement> {
    let r = layers.first().map_or(0, Vec::len);
    if r == 0 || layers.iter().any(|u| u.len() != r) {
        return Err(Error::InvalidInput("layers must be nonempty and of equal size".into()));
    }
    for u in layers {
        let mut seen = 0u64;
        for &s in u {
            check_support(n, s)?;
            if s & seen != 0 {
                return Err(Error::InvalidInput("supports in a layer overlap".into()));
            }
            seen |= s;
        }
    }
    let perms = if r <= 6 { permutations(r) } else { Vec::new() };
    let mut inter: Vec<Option<u64>> = layers[0].iter().map(|&s| Some(s)).collect();
    let mut slots = vec![(0..r).collect::<Vec<_>>()];
    for u in &layers[1..] {
        let p = best_matching(&inter, u, &perms);
        for (m, &k) in inter.iter_mut().zip(&p) {
            if let Some(v) = m {
                *m = Some(*v & u[k]).filter(|&x| x != 0);
            }
        }
        slots.push(p);
    }
    let mut anchors = Vec::with_capacity(r);
    let mut ancillas = 0;
    for (i, m) in inter.iter().enumerate() {
        match m {
            Some(m) => {
                let first = layers[0][slots[0][i]];
                let score = |q: usize| {
                    prefer.iter().filter(|(a, _)| *a == q).map(|(_, s)| 1 + size(s & first)).max().unwrap_or(0)
                };
                let q = qubits_of(*m).max_by_key(|&q| (score(q), q)).expect("nonempty");
                anchors.push(q);
            }
            None => {
                anchors.push(n + ancillas);
                ancillas += 1;
            }
        }
    }
    let placed = layers
        .iter()
        .zip(&slots)
        .map(|(u, p)| p.iter().zip(&anchors).map(|(&k, &a)| if a >= n { u[k] | (1 << a) } else { u[k] }).collect())
        .collect();
    Ok(HadamardPlacement { layers: placed, slots, anchors, ancillas, hadamards: 2 * r })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerOrder {
    pub order: Vec<usize>,
    /// Sum of shared support sizes over consecutive layers.
    pub shared: usize,
    /// `2 · shared`.
    pub canceled: usize,
}

fn shared_support(u: &[u64], v: &[u64]) -> usize {
    u.iter().zip(v).map(|(a, b)| size(a & b)).sum()
}

/// Order chain-aligned layers to maximise the shared support of neighbours:
/// nearest neighbour from every start, then 2-opt on the open path.
pub fn order_layers(layers: &[Vec<u64>]) -> LayerOrder {
    let k = layers.len();
    let w: Vec<Vec<usize>> = (0..k).map(|a| (0..k).map(|b| shared_support(&layers[a], &layers[b])).collect()).collect();
    let total = |p: &[usize]| p.windows(2).map(|e| w[e[0]][e[1]]).sum::<usize>();
    let mut best: Vec<usize> = (0..k).collect();
    let mut best_total = total(&best);
    for start in 0..k {
        let mut path = vec![start];
        let mut left: Vec<usize> = (0..k).filter(|&v| v != start).collect();
        while !left.is_empty() {
            let cur = *path.last().expect("nonempty");
            let pos = (0..left.len()).max_by_key(|&p| (w[cur][left[p]], std::cmp::Reverse(left[p]))).expect("nonempty");
            path.push(left.remove(pos));
        }
        loop {
            let mut improved = false;
            for i in 0..k {
                for j in i + 1..k {
                    let before = total(&path);
                    path[i..=j].reverse();
                    if total(&path) > before {
                        improved = true;
                    } else {
                        path[i..=j].reverse();
                    }
                }
            }
            if !improved {
                break;
            }
        }
        let t = total(&path);
        if t > best_total {
            best_total = t;
            best = path;
        }
    }
    LayerOrder { order: best, shared: best_total, canceled: 2 * best_total }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagOptions {
    /// Treat two-qubit terms like the larger ones instead of folding them
    /// into a single `GZZ`.
    pub pairs_as_hard: bool,
    /// Never add ancillas; a layer group whose chains lose their common
    /// qubit is cut into runs that keep one, at the cost of extra Hadamards.
    pub no_ancillas: bool,
}

/// Cut layers into runs along which every chain keeps a common qubit.
fn chained_runs(layers: &[Vec<u64>]) -> Vec<std::ops::Range<usize>> {
    let r = layers[0].len();
    let perms = if r <= 6 { permutations(r) } else { Vec::new() };
    let fresh = |u: &[u64]| u.iter().map(|&s| Some(s)).collect::<Vec<_>>();
    let mut runs = Vec::new();
    let mut start = 0;
    let mut inter = fresh(&layers[0]);
    for (k, u) in layers.iter().enumerate().skip(1) {
        let p = best_matching(&inter, u, &perms);
        let next: Vec<Option<u64>> =
            inter.iter().zip(&p).map(|(m, &j)| m.map(|v| v & u[j]).filter(|&x| x != 0)).collect();
        if next.iter().any(Option::is_none) {
            runs.push(start..k);
            start = k;
            inter = fresh(u);
        } else {
            inter = next;
        }
    }
    runs.push(start..layers.len());
    runs
}

/// One set of layers with a common number of supports, as emitted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerGroup {
    /// Layers in emission order, chain-aligned, ancilla bits included.
    pub layers: Vec<Vec<u64>>,
    /// Term index (into the polynomial's terms) per layer and chain.
    pub terms: Vec<Vec<usize>>,
    pub anchors: Vec<usize>,
    pub ancillas: usize,
    /// Order found by `order_layers`, over the layers as built.
    pub order: LayerOrder,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiagReport {
    pub n: usize,
    pub ancillas: usize,
    pub gzz: usize,
    pub hadamards: usize,
    pub encoding_cost: usize,
    /// Two fan `GZZ` per large term, each on its own.
    pub baseline_cost: usize,
    pub hard_terms: usize,
    pub layers: usize,
    /// CZ count of the unmerged term circuits.
    pub naive_cz: usize,
    /// Pairs coupled by the emitted fan `GZZ`s.
    pub emitted_cz: usize,
    pub canceled_cz: usize,
    /// `2 · Σ` shared support of consecutive layers.
    pub shared_support_cancel: usize,
}

#[derive(Clone, Debug)]
pub struct DiagonalCompilation {
    pub circuit: Circuit,
    pub groups: Vec<LayerGroup>,
    pub report: DiagReport,
}

type Pairs = BTreeSet<(usize, usize)>;

fn toggle(p: &mut Pairs, a: usize, b: usize) {
    let e = (a.min(b), a.max(b));
    if !p.remove(&e) {
        p.insert(e);
    }
}

fn fan(layer: &[u64], anchors: &[usize]) -> Pairs {
    let mut p = Pairs::new();
    for (&s, &a) in layer.iter().zip(anchors) {
        for l in qubits_of(s).filter(|&l| l != a) {
            toggle(&mut p, l, a);
        }
    }
    p
}

fn xor(mut a: Pairs, b: &Pairs) -> Pairs {
    for &(i, j) in b {
        toggle(&mut a, i, j);
    }
    a
}

enum Seg {
    H(Vec<usize>),
    Fan(Pairs),
    Rot(Vec<(usize, f64)>),
}

/// Compile `e^{2πi f}`. One- and (by default) two-qubit terms become `RZ`
/// and one `GZZ`; larger terms are layered, anchored and ordered. Ancillas,
/// if any, follow the `n` system qubits and start and end in `|0⟩`.
pub fn compile_diagonal(p: &PhasePolynomial, opts: &DiagOptions) -> Result<DiagonalCompilation> {
    let n = p.n();
    let mut head = Circuit::new(n);
    head.add(Gate::Phase(Angle::Rad(2.0 * PI * p.global())));
    let mut pair_layer = HollowSymmetric::zeros(n);
    let mut hard = Vec::new();
    for (idx, &(s, alpha)) in p.terms().iter().enumerate() {
        match size(s) {
            1 => head.add(Gate::RZ(Angle::Rad(2.0 * PI * alpha), s.trailing_zeros() as usize)),
            2 if !opts.pairs_as_hard => {
                // e^{iβ(x_i⊕x_j)} = e^{iβ/2} GZZ(−β/2) with β = 2πα.
                let mut q = qubits_of(s);
                let (i, j) = (q.next().expect("two"), q.next().expect("two"));
                pair_layer.set(i, j, pair_layer.get(i, j) - PI * alpha);
                head.add(Gate::Phase(Angle::Rad(PI * alpha)));
            }
            _ => hard.push(idx),
        }
    }
    if !pair_layer.is_zero() {
        head.add(Gate::GZZ(pair_layer));
    }

    let supports: Vec<u64> = hard.iter().map(|&i| p.terms()[i].0).collect();
    let mut built = parallelize_supports(&supports, opts.pairs_as_hard)?;
    built.sort_by_key(|u| std::cmp::Reverse(u.len()));
    let mut groups: Vec<Vec<Vec<usize>>> = Vec::new();
    for u in built {
        match groups.last_mut() {
            Some(g) if g[0].len() == u.len() => g.push(u),
            _ => groups.push(vec![u]),
        }
    }

    if opts.no_ancillas {
        groups = groups
            .into_iter()
            .flat_map(|g| {
                let layers: Vec<Vec<u64>> = g.iter().map(|u| u.iter().map(|&k| supports[k]).collect()).collect();
                chained_runs(&layers).into_iter().map(|r| g[r].to_vec()).collect::<Vec<_>>()
            })
            .collect();
    }

    let mut segs = Vec::new();
    let mut out_groups = Vec::new();
    let mut prefer: Vec<(usize, u64)> = Vec::new();
    let mut pending: Option<(Vec<usize>, Pairs)> = None;
    let mut report = DiagReport { n, hard_terms: hard.len(), ..Default::default() };
    for g in groups {
        let layers: Vec<Vec<u64>> = g.iter().map(|u| u.iter().map(|&k| supports[k]).collect()).collect();
        let placed = place_with_preference(&layers, n, &prefer)?;
        let order = order_layers(&placed.layers);
        let ordered: Vec<Vec<u64>> = order.order.iter().map(|&k| placed.layers[k].clone()).collect();
        let terms: Vec<Vec<usize>> =
            order.order.iter().map(|&k| placed.slots[k].iter().map(|&pos| hard[g[k][pos]]).collect()).collect();
        let anchors = placed.anchors.clone();
        report.ancillas = report.ancillas.max(placed.ancillas);
        report.layers += ordered.len();
        report.shared_support_cancel += order.canceled;
        report.naive_cz += ordered.iter().flatten().map(|&s| 2 * (size(s) - 1)).sum::<usize>();

        let first = fan(&ordered[0], &anchors);
        match pending.take() {
            Some((prev, last)) => {
                let a: BTreeSet<usize> = prev.iter().copied().collect();
                let b: BTreeSet<usize> = anchors.iter().copied().collect();
                let flip: Vec<usize> = a.symmetric_difference(&b).copied().collect();
                let (left, moved): (Pairs, Pairs) =
                    last.into_iter().partition(|(i, j)| flip.contains(i) || flip.contains(j));
                segs.push(Seg::Fan(left));
                segs.push(Seg::H(flip));
                segs.push(Seg::Fan(xor(moved, &first)));
            }
            None => {
                segs.push(Seg::H(anchors.clone()));
                segs.push(Seg::Fan(first));
            }
        }
        for k in 0..ordered.len() {
            let rot = terms[k].iter().zip(&anchors).map(|(&t, &a)| (a, p.terms()[t].1)).collect();
            segs.push(Seg::Rot(rot));
            let here = fan(&ordered[k], &anchors);
            match ordered.get(k + 1) {
                Some(next) => segs.push(Seg::Fan(xor(here, &fan(next, &anchors)))),
                None => pending = Some((anchors.clone(), here)),
            }
        }
        prefer = anchors.iter().zip(ordered.last().expect("nonempty")).map(|(&a, &s)| (a, s)).collect();
        out_groups.push(LayerGroup { layers: ordered, terms, anchors, ancillas: placed.ancillas, order });
    }
    if let Some((anchors, last)) = pending {
        segs.push(Seg::Fan(last));
        segs.push(Seg::H(anchors));
    }

    let width = n + report.ancillas;
    let mut c = Circuit::new(width);
    let embed: Vec<usize> = (0..n).collect();
    c.extend(&head.remap(width, &embed)?)?;
    for seg in segs {
        match seg {
            Seg::H(qs) => {
                report.hadamards += qs.len();
                qs.into_iter().for_each(|q| c.add(Gate::H(q)));
            }
            Seg::Fan(pairs) => {
                if pairs.is_empty() {
                    continue;
                }
                report.emitted_cz += pairs.len();
                let mut a = HollowSymmetric::zeros(width);
                pairs.iter().for_each(|&(i, j)| a.set(i, j, 1.0));
                c.extend(&compile_cz_layer(&a)?)?;
            }
            Seg::Rot(rots) => {
                for (q, alpha) in rots {
                    let turns = alpha.rem_euclid(1.0);
                    if turns == 0.0 {
                        continue;
                    }
                    if turns == 0.5 {
                        c.add(Gate::X(q));
                    } else {
                        c.add(Gate::RX(Angle::Rad(2.0 * PI * alpha), q));
                    }
                }
            }
        }
    }
    let cost = c.cost_report();
    report.gzz = cost.gzz;
    report.encoding_cost = cost.encoding_cost;
    report.baseline_cost = hard.iter().map(|&i| 2 * support_cost(size(p.terms()[i].0))).sum();
    report.canceled_cz = report.naive_cz - report.emitted_cz;
    Ok(DiagonalCompilation { circuit: c, groups: out_groups, report })
}

/// Phases of a circuit on its first `n` qubits, with the remaining qubits
/// starting in `|0⟩`. Errors unless the action is diagonal on that subspace
/// and leaves the other qubits in `|0⟩`; checked on two input states.
pub fn diagonal_action(c: &Circuit, n: usize) -> Result<DiagonalPhases> {
    let width = c.n();
    if n > width {
        return Err(Error::DimensionMismatch { expected: width, got: n });
    }
    let extra = width - n;
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    let probe = |theta: &dyn Fn(usize) -> f64| -> Result<Vec<f64>> {
        let mut init = vec![C64::new(0.0, 0.0); 1 << width];
        for x in 0..dim {
            init[x << extra] = C64::from_polar(amp, theta(x));
        }
        let out = simulate_state(c, &init)?;
        let mut phases = Vec::with_capacity(dim);
        for x in 0..dim {
            let v = out[x << extra] / C64::from_polar(1.0, theta(x));
            if (v.norm() - amp).abs() > 1e-9 {
                return Err(Error::NonDiagonal(format!("circuit moves basis state {x}")));
            }
            phases.push(v.arg());
        }
        Ok(phases)
    };
    let flat = probe(&|_| 0.0)?;
    let mixed = probe(&|x| (x as f64 * 0.618_033_988_75 * 2.0 * PI).rem_euclid(2.0 * PI))?;
    let a = DiagonalPhases { n, phases: flat };
    let b = DiagonalPhases { n, phases: mixed };
    if a.distance(&b) > 1e-9 {
        return Err(Error::NonDiagonal("phases depend on the input state".into()));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mask(qs: &[usize]) -> u64 {
        qs.iter().fold(0, |m, &q| m | (1 << (q - 1)))
    }

    /// Seven supports of the five-qubit worked example, 1-based.
    fn example() -> PhasePolynomial {
        let s = [&[1, 2][..], &[3, 4], &[4, 5], &[2, 5], &[1, 2, 3], &[3, 4, 5], &[2, 3, 4, 5]];
        PhasePolynomial::new(5, 0.0, s.iter().map(|q| (mask(q), 0.5)).collect()).unwrap()
    }

    #[test]
    fn table_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=10 {
            let f: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = phase_poly_from_table(&f).unwrap();
            let back = p.table();
            assert!(f.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-12), "n={n}");
        }
        assert!(phase_poly_from_table(&[0.0; 3]).is_err());
        assert!(phase_poly_from_table(&vec![0.0; 1 << 17]).is_err());
    }

    #[test]
    fn single_parity_table() {
        // f = ½ (x₁ ⊕ x₃) on three qubits.
        let want = PhasePolynomial::new(3, 0.0, vec![(mask(&[1, 3]), 0.5)]).unwrap();
        let p = phase_poly_from_table(&want.table()).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].0, mask(&[1, 3]));
        assert!((p.terms()[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_uses_one_based_qubits() {
        let p = PhasePolynomial::new(3, 0.25, vec![(mask(&[1, 3]), 0.5)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("[1,3]"), "{s}");
        let back: PhasePolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PhasePolynomial>(r#"{"n":2,"terms":[{"qubits":[3],"alpha":1}]}"#).is_err());
    }

    #[test]
    fn term_circuit_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let s = rng.gen_range(1..1u64 << n);
            let alpha = rng.gen_range(-1.0..1.0);
            let qs: Vec<usize> = qubits_of(s).collect();
            let anchor = qs[rng.gen_range(0..qs.len())];
            let c = term_circuit(n, s, alpha, anchor).unwrap();
            let want = PhasePolynomial::new(n, 0.0, vec![(s, alpha)]).unwrap().phases();
            assert!(diagonal_action(&c, n).unwrap().distance(&want) < 1e-10);
        }
        assert!(term_circuit(3, 0b011, 0.1, 2).is_err());
    }

    #[test]
    fn layering_example() {
        let s = [mask(&[1, 2]), mask(&[3, 4]), mask(&[1, 3])];
        assert_eq!(parallelize_supports(&s, true).unwrap(), vec![vec![0, 1], vec![2]]);
        assert!(parallelize_supports(&s, false).is_err());
    }

    #[test]
    fn layers_partition_supports() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = 8;
            let s: Vec<u64> =
                (0..rng.gen_range(1..20)).map(|_| rng.gen_range(1..1u64 << n)).filter(|s| size(*s) >= 3).collect();
            let layers = parallelize_supports(&s, false).unwrap();
            let mut seen: Vec<usize> = layers.iter().flatten().copied().collect();
            seen.sort();
            assert_eq!(seen, (0..s.len()).collect::<Vec<_>>());
            for u in &layers {
                let total: u32 = u.iter().map(|&k| s[k].count_ones()).sum();
                assert_eq!(u.iter().fold(0, |m, &k| m | s[k]).count_ones(), total);
            }
        }
    }

    #[test]
    fn disjoint_chains_need_ancillas() {
        let layers = vec![vec![mask(&[1, 2, 3]), mask(&[4, 5, 6])], vec![mask(&[7, 8, 9]), mask(&[10, 11, 12])]];
        let p = place_hadamards(&layers, 12).unwrap();
        assert_eq!(p.ancillas, 2);
        assert_eq!(p.anchors, vec![12, 13]);
        assert_eq!(p.hadamards, 4);
        assert!(p.layers.iter().all(|u| (u[0] >> 12) & 1 == 1 && (u[1] >> 13) & 1 == 1));
    }

    #[test]
    fn worked_example() {
        let p = example();
        let out = compile_diagonal(&p, &DiagOptions { pairs_as_hard: true, ..Default::default() }).unwrap();
        let r = &out.report;
        assert_eq!(r.gzz, 6);
        assert_eq!(r.encoding_cost, 29);
        assert_eq!(r.ancillas, 0);
        assert_eq!(r.shared_support_cancel, 14);
        // 22 fan CZs before merging, 14 pairs emitted.
        assert_eq!((r.naive_cz, r.emitted_cz, r.canceled_cz), (22, 14, 8));
        assert_eq!(r.baseline_cost, 32);
        // 2r per layer group, less the pair cancelled between groups on x₄.
        assert_eq!(r.hadamards, 4);

        let g = &out.groups[0];
        assert_eq!(g.anchors, vec![1, 3]);
        // Layers by content: {12, 345}, {123, 45}, {25, 34}.
        let u1 = vec![mask(&[1, 2]), mask(&[3, 4, 5])];
        let u2 = vec![mask(&[1, 2, 3]), mask(&[4, 5])];
        let u3 = vec![mask(&[2, 5]), mask(&[3, 4])];
        assert_eq!(g.layers, vec![u2, u1, u3]);
        assert_eq!(out.groups[1].anchors, vec![3]);

        let got = diagonal_action(&out.circuit, 5).unwrap();
        assert!(got.distance(&p.phases()) < 1e-10);
        assert_eq!(out.circuit.count("X"), 7);
    }

    #[test]
    fn ancilla_free_mode_splits_chains() {
        // Pairwise overlapping, no common qubit: one chain of three layers.
        let terms = [&[1, 2, 3][..], &[1, 4, 5], &[2, 4, 6]];
        let p = PhasePolynomial::new(6, 0.0, terms.iter().map(|q| (mask(q), 0.3)).collect()).unwrap();
        let with = compile_diagonal(&p, &DiagOptions::default()).unwrap();
        assert_eq!(with.report.ancillas, 1);
        assert_eq!(with.circuit.n(), 7);
        assert!(diagonal_action(&with.circuit, 6).unwrap().distance(&p.phases()) < 1e-10);
        let without = compile_diagonal(&p, &DiagOptions { no_ancillas: true, ..Default::default() }).unwrap();
        assert_eq!(without.report.ancillas, 0);
        assert_eq!(without.circuit.n(), 6);
        assert_eq!(without.groups.len(), 2);
        assert!(diagonal_action(&without.circuit, 6).unwrap().distance(&p.phases()) < 1e-10);
    }

    #[test]
    fn lemma_census_on_chained_layers() {
        // Three layers of two supports, chains through qubits 1 and 5.
        let layers = vec![
            vec![mask(&[1, 2, 3]), mask(&[4, 5, 6])],
            vec![mask(&[1, 4, 7]), mask(&[2, 5, 8])],
            vec![mask(&[1, 6, 8]), mask(&[3, 5, 7])],
        ];
        let terms: Vec<(u64, f64)> = layers.iter().flatten().map(|&s| (s, 0.2)).collect();
        let p = PhasePolynomial::new(8, 0.0, terms).unwrap();
        let out = compile_diagonal(&p, &DiagOptions::default()).unwrap();
        assert_eq!(out.groups.len(), 1);
        assert_eq!(out.report.ancillas, 0);
        assert_eq!(out.groups[0].anchors, vec![0, 4]);
        assert_eq!(out.report.gzz, 3 + 1);
        assert_eq!(out.report.hadamards, 4);
        assert_eq!(out.circuit.count("RX"), 6);
        assert!(diagonal_action(&out.circuit, 8).unwrap().distance(&p.phases()) < 1e-10);
    }

    #[test]
    fn shared_support_matrix() {
        let u1 = vec![mask(&[1, 2]), mask(&[3, 4, 5])];
        let u2 = vec![mask(&[1, 2, 3]), mask(&[4, 5])];
        let u3 = vec![mask(&[2, 5]), mask(&[3, 4])];
        assert_eq!(shared_support(&u1, &u2), 4);
        assert_eq!(shared_support(&u1, &u3), 3);
        assert_eq!(shared_support(&u2, &u3), 2);
        let o = order_layers(&[u1, u2, u3]);
        assert_eq!(o.order, vec![1, 0, 2]);
        assert_eq!(o.canceled, 14);
    }

    #[test]
    fn only_easy_terms() {
        let p =
            PhasePolynomial::new(4, 0.1, vec![(0b0011, 0.3), (0b1100, -0.2), (0b0100, 0.7), (0b1001, 0.05)]).unwrap();
        let out = compile_diagonal(&p, &DiagOptions::default()).unwrap();
        assert_eq!(out.report.gzz, 1);
        assert_eq!(out.circuit.count("H"), 0);
        assert!(diagonal_action(&out.circuit, 4).unwrap().distance(&p.phases()) < 1e-12);
    }

    #[test]
    fn random_tables_compile_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 3..=7 {
            for trial in 0..50 {
                let f: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(0.0..1.0)).collect();
                let p = phase_poly_from_table(&f).unwrap();
                let opts = DiagOptions { pairs_as_hard: trial % 2 == 1, no_ancillas: trial % 3 == 0 };
                let out = compile_diagonal(&p, &opts).unwrap();
                let got = diagonal_action(&out.circuit, n).unwrap();
                assert!(got.distance(&p.phases()) < 1e-10, "n={n} trial={trial}");
                let r = &out.report;
                let recount: usize = out
                    .circuit
                    .gates()
                    .iter()
                    .filter_map(|g| match g {
                        Gate::GZZ(a) => Some(a.support().len()),
                        _ => None,
                    })
                    .sum::<usize>();
                let easy = if opts.pairs_as_hard { 0 } else { p.terms().iter().filter(|t| size(t.0) == 2).count() };
                assert_eq!(r.naive_cz - (recount - easy), r.canceled_cz, "n={n}");
            }
        }
    }
}
