//! The acceptance suite: ten fixed checks with fixed seeds and time limits.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cartan::CartanMatrix;
use crate::cluster::{
    b_of_c, check_tb, check_yb, correspondence_check, laurent_check, mutate_matrix, mutate_seed, parity_lemmas, run_sequence, square_product, symbolic_seed,
    t_to_y_b, ExchangeMatrix,
};
use crate::error::Result;
use crate::exactmath::Scalar;
use crate::period::scan_period;
use crate::table::{FactorList, Policy, SystemKind, ValueTable, Window};
use crate::tsystem::{
    check_t_solution, enumerate_relations, g_exponents, identity_check_1, identity_check_2, m_term, m_term_unified, propagate_t, random_node_table,
};
use crate::ysystem::{
    boundary_check, check_y_solution, enumerate_y_relations, propagate_y, t_to_y, y_relation, y_relation_via_transpose, y_to_t, z_term, FreeChoice,
};
use crate::Parity;

/// One criterion's outcome. `pass` includes the time limit.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: Option<u128>,
}

impl Outcome {
    pub fn line(&self) -> String {
        let limit = self.limit_ms.map_or(String::new(), |l| format!(" / {l} ms"));
        format!("[{}] {:>2} {}: {} ({} ms{limit})", if self.pass { "PASS" } else { "FAIL" }, self.id, self.title, self.detail, self.elapsed_ms)
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(u8, &str, Option<u64>, Check); 10] = [
    (1, "Cartan classification", Some(1), cartan_classification),
    (2, "unified M-term forms", Some(5), unified_forms),
    (3, "telescoping identities", None, telescoping),
    (4, "T to Y on restricted systems", Some(30), t_to_y_restricted),
    (5, "Y to T roundtrip", Some(60), y_to_t_roundtrip),
    (6, "transposed Y-system", None, transposed),
    (7, "cluster engine", Some(30), cluster_engine),
    (8, "bipartite belt lemmas", Some(120), belt_lemmas),
    (9, "correspondence", None, correspondence),
    (10, "periodicity smoke test", Some(5), periodicity),
];

pub fn run(id: u8) -> Option<Outcome> {
    let &(id, title, limit, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let (ok, detail) = match result {
        Ok((ok, detail)) if in_time => (ok, detail),
        Ok((ok, detail)) => (false, format!("{detail}; {} over the time limit", if ok { "checks pass but" } else { "failed and" })),
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome { id, title, pass: ok, detail, elapsed_ms: elapsed.as_millis(), limit_ms: limit.map(|l| l.as_millis()) })
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

pub fn example44() -> CartanMatrix {
    CartanMatrix::new(vec![vec![2, -1, 0, 0], vec![-3, 2, -2, -2], vec![0, -1, 2, -1], vec![0, -1, -1, 2]]).expect("valid")
}

pub fn b2_like() -> CartanMatrix {
    CartanMatrix::new(vec![vec![2, -1], vec![-2, 2]]).expect("valid")
}

pub fn g2_like() -> CartanMatrix {
    CartanMatrix::new(vec![vec![2, -1], vec![-3, 2]]).expect("valid")
}

pub fn three_cycle() -> CartanMatrix {
    CartanMatrix::new(vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]).expect("valid")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Finite types of rank at most four, entered by hand.
fn finite_types() -> Vec<(&'static str, Vec<Vec<i64>>)> {
    vec![
        ("A1", vec![vec![2]]),
        ("A2", vec![vec![2, -1], vec![-1, 2]]),
        ("A3", vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]),
        ("A4", vec![vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]]),
        ("B2", vec![vec![2, -2], vec![-1, 2]]),
        ("B3", vec![vec![2, -1, 0], vec![-1, 2, -2], vec![0, -1, 2]]),
        ("B4", vec![vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -1, 2, -2], vec![0, 0, -1, 2]]),
        ("C3", vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -2, 2]]),
        ("C4", vec![vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -1, 2, -1], vec![0, 0, -2, 2]]),
        ("D4", vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]),
        ("F4", vec![vec![2, -1, 0, 0], vec![-1, 2, -2, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]]),
        ("G2", vec![vec![2, -1], vec![-3, 2]]),
    ]
}

fn cartan_classification() -> Result<(bool, String)> {
    let cm = example44();
    let mut fails = Vec::new();
    if cm.symmetrizer() != [3, 1, 2, 2] || cm.t() != 6 || !cm.is_tamely_laced() {
        fails.push(format!("example: d = {:?}, t = {}", cm.symmetrizer(), cm.t()));
    }
    if CartanMatrix::new(vec![vec![2, -2], vec![-2, 2]])?.is_tamely_laced() {
        fails.push("affine A1 accepted".into());
    }
    let types = finite_types();
    for (name, entries) in &types {
        if !CartanMatrix::new(entries.clone())?.is_tamely_laced() {
            fails.push(format!("{name} rejected"));
        }
    }
    Ok((fails.is_empty(), if fails.is_empty() { format!("example, affine A1 and {} finite types", types.len()) } else { fails.join("; ") }))
}

fn unified_forms() -> Result<(bool, String)> {
    let mut count = 0;
    for cm in [example44(), b2_like(), g2_like(), CartanMatrix::type_a(3)] {
        for a in 0..cm.rank() {
            for m in 1..=6 {
                for k in 0..20 {
                    let plain = m_term(&cm, a, m, k)?;
                    let unified = m_term_unified(&cm, a, m, k)?;
                    let g: FactorList = g_exponents(&cm, a, m, k)?.into_iter().collect();
                    if plain != unified || plain != g {
                        return Ok((false, format!("mismatch at node {}, m = {m}, k = {k}", a + 1)));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok((true, format!("{count} positions agree")))
}

fn telescoping() -> Result<(bool, String)> {
    let mut rng = rng(3);
    let w = Window::new(0, 9)?;
    let levels = 1..=3;
    let centres = w.width() * 3;
    for p in 1..=3 {
        let t = random_node_table(&mut rng, 0, 4 * p, w, 3 * p, 8);
        if !identity_check_1(p, 0, levels.clone(), w, &t)? {
            return Ok((false, format!("first identity fails for p = {p}")));
        }
    }
    for db in 1..=3 {
        let t = random_node_table(&mut rng, 0, 6, w, 4, 8);
        if !identity_check_2(db, 0, levels.clone(), w, &t)? {
            return Ok((false, format!("second identity fails for d = {db}")));
        }
    }
    Ok((true, format!("{centres} centres per case, 6 cases")))
}

fn t_to_y_restricted() -> Result<(bool, String)> {
    let w = Window::new(0, 39)?;
    let mut checked = 0;
    let cases = [(CartanMatrix::type_a(2), 2), (CartanMatrix::type_a(2), 3), (CartanMatrix::type_a(3), 2), (CartanMatrix::type_a(3), 3), (b2_like(), 2)];
    for (n, (cm, level)) in cases.iter().enumerate() {
        let kind = SystemKind::Restricted { level: *level };
        let t = propagate_t(cm, *level, w, &ValueTable::new(), &mut rng(40 + n as u64), Policy::default())?;
        if !check_t_solution(&t, &enumerate_relations(cm, kind, w)?)?.pass {
            return Ok((false, format!("case {} is not a T-solution", n + 1)));
        }
        let (y, identities) = t_to_y(cm, kind, &t)?;
        let rels: Vec<_> = enumerate_y_relations(cm, kind, w)?.into_iter().filter(|r| r.variables().all(|v| y.contains(&v))).collect();
        let ys = check_y_solution(&y, &rels)?;
        let boundary = boundary_check(cm, *level, w)?;
        if !(identities.pass && ys.pass && boundary.pass) || rels.is_empty() {
            return Ok((false, format!("case {}: identities {}, Y-system {}, boundary {}", n + 1, identities.pass, ys.pass, boundary.pass)));
        }
        checked += identities.checked + ys.checked + boundary.checked;
    }
    Ok((true, format!("{} cases, {checked} checks", cases.len())))
}

fn y_to_t_roundtrip() -> Result<(bool, String)> {
    let mut compared = 0;
    for (n, (cm, m_cap, width)) in [(CartanMatrix::type_a(3), 3, 16), (b2_like(), 3, 20), (example44(), 1, 14)].into_iter().enumerate() {
        let kind = SystemKind::Unrestricted { m_cap };
        let w = Window::new(0, width - 1)?;
        let y = propagate_y(&cm, kind, w, &ValueTable::new(), &mut rng(50 + n as u64), Policy::default())?;
        let first = y_to_t(&cm, kind, &y, w, FreeChoice::Random, &mut rng(1), Policy::default())?;
        let second = y_to_t(&cm, kind, &y, w, FreeChoice::Random, &mut rng(2), Policy::default())?;
        if first.t == second.t {
            return Ok((false, format!("case {}: free choices did not change T", n + 1)));
        }
        let (back1, r1) = t_to_y(&cm, kind, &first.t)?;
        let (back2, r2) = t_to_y(&cm, kind, &second.t)?;
        if !(r1.pass && r2.pass) {
            return Ok((false, format!("case {}: T-to-Y identities fail", n + 1)));
        }
        let mut here = 0;
        for (v, value) in back1.iter().filter(|(v, _)| v.m <= kind.max_level(&cm, v.a) && first.determined.contains(v.k)) {
            let Some(orig) = y.get(v) else { continue };
            if orig != value || back2.get(v) != Some(value) {
                return Ok((false, format!("case {}: Y differs at {v}", n + 1)));
            }
            here += 1;
        }
        if here == 0 {
            return Ok((false, format!("case {}: nothing compared", n + 1)));
        }
        compared += here;
    }
    Ok((true, format!("{compared} Y values reproduced")))
}

fn transposed() -> Result<(bool, String)> {
    let mut count = 0;
    for cm in [example44(), b2_like(), g2_like(), CartanMatrix::type_a(3)] {
        for kind in [SystemKind::Restricted { level: 2 }, SystemKind::Unrestricted { m_cap: 2 }] {
            for a in 0..cm.rank() {
                for m in 1..=kind.max_level(&cm, a) {
                    for k in 0..20 {
                        if y_relation(&cm, kind, a, m, k)? != y_relation_via_transpose(&cm, kind, a, m, k)? {
                            return Ok((false, format!("node {}, m = {m}, k = {k}", a + 1)));
                        }
                        count += 1;
                    }
                }
            }
        }
    }
    for p in 1..=4 {
        let n: u32 = z_term(0, p, 3, 0).iter().map(|f| f.1).sum();
        if n as i64 != p * p {
            return Ok((false, format!("Z-term for p = {p} has {n} factors")));
        }
    }
    Ok((true, format!("{count} relations equal, Z-term sizes p^2")))
}

pub fn seven_node() -> ExchangeMatrix {
    let mut b = vec![vec![0i64; 7]; 7];
    let mut set = |i: usize, j: usize, v: i64| {
        b[i - 1][j - 1] = v;
        b[j - 1][i - 1] = -v;
    };
    set(2, 1, 2);
    set(1, 3, 2);
    for j in 4..=7 {
        set(3, j, 1);
        set(j, 2, 1);
    }
    ExchangeMatrix::new(b).expect("valid").with_parity(Parity::from_plus(7, &[1, 2]).expect("valid")).expect("valid")
}

/// Random skew-symmetrizable `S D` with entries only across a random split.
fn random_parity_consistent(rng: &mut ChaCha8Rng) -> ExchangeMatrix {
    use rand::Rng;
    let n = rng.gen_range(2..=6);
    let plus: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let mut b = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..i {
            if plus[i] != plus[j] {
                let s = rng.gen_range(-2..=2);
                b[i][j] = s * d[j];
                b[j][i] = -s * d[i];
            }
        }
    }
    ExchangeMatrix::new(b).expect("skew-symmetrizable by construction").with_parity(Parity::new(plus)).expect("sizes match")
}

fn cluster_engine() -> Result<(bool, String)> {
    let mut rng = rng(7);
    let mut disagreements = 0;
    let mut b2_true = 0;
    for _ in 0..100 {
        let e = random_parity_consistent(&mut rng);
        let (b2, bb) = (e.check_b2()?, e.check_bb()?);
        disagreements += usize::from(b2 != bb);
        b2_true += usize::from(b2);
        for k in 0..e.size() {
            if mutate_matrix(&mutate_matrix(&e, k)?, k)? != e {
                return Ok((false, format!("mutation at {} is not an involution", k + 1)));
            }
        }
        let mut order = e.parity().expect("set").plus_nodes();
        let forward = order.iter().try_fold(e.clone(), |m, &k| mutate_matrix(&m, k))?;
        order.reverse();
        if order.iter().try_fold(e.clone(), |m, &k| mutate_matrix(&m, k))? != forward {
            return Ok((false, "composed mutation depends on order".into()));
        }
    }
    let seven = seven_node();
    let seeded = symbolic_seed(seven.clone());
    for k in 0..7 {
        let back = mutate_seed(&mutate_seed(&seeded, k)?, k)?;
        if back.matrix != seven || !back.x.iter().zip(&seeded.x).all(|(a, b)| a.same(b)) || !back.y.iter().zip(&seeded.y).all(|(a, b)| a.same(b)) {
            return Ok((false, format!("seed mutation at {} is not an involution", k + 1)));
        }
    }
    let seven_ok = seven.check_b1()? && seven.check_b2()? && seven.check_bb()?;
    let pass = seven_ok && disagreements == 0;
    Ok((pass, format!("seven-node conditions {seven_ok}, 100 random matrices ({b2_true} satisfy both), {disagreements} disagreements")))
}

fn belt_lemmas() -> Result<(bool, String)> {
    let a2 = CartanMatrix::type_a(2);
    let a3 = CartanMatrix::type_a(3);
    let p2 = a2.bipartition().expect("bipartite");
    let matrices =
        [("B(A2)", b_of_c(&a2, &p2)?), ("B(A3)", b_of_c(&a3, &a3.bipartition().expect("bipartite"))?), ("B(A2)xB(A2)", square_product(&a2, &p2, &a2, &p2)?)];
    let mut checked = 0;
    for (name, b) in matrices {
        let seq = run_sequence(&symbolic_seed(b.clone()), -6, 6)?;
        let mut parts = vec![("parity lemmas", parity_lemmas(&seq)?), ("T(B)", check_tb(&seq)?), ("Laurent", laurent_check(&seq))];
        for eps in [1, -1] {
            parts.push((if eps > 0 { "Y+(B)" } else { "Y-(B)" }, check_yb(&seq, eps)?));
            parts.push(("T to Y", t_to_y_b(&b, &seq.x, eps)?.1));
        }
        for (what, r) in parts {
            if !r.pass || r.checked == 0 {
                return Ok((false, format!("{name}: {what} ({} violations)", r.violations.len())));
            }
            checked += r.checked;
        }
    }
    Ok((true, format!("3 matrices over 12 steps, {checked} checks")))
}

fn correspondence() -> Result<(bool, String)> {
    let mut checked = 0;
    // the double of the 3-cycle is an affine cycle whose cluster variables
    // grow quickly, so its window is one step shorter
    let cases = [("A3 level 2", CartanMatrix::type_a(3), 2, 4), ("A2 level 3", CartanMatrix::type_a(2), 3, 4), ("3-cycle level 2", three_cycle(), 2, 3)];
    for (name, cm, level, steps) in cases {
        let r = correspondence_check(&cm, level, steps)?;
        if !r.pass {
            return Ok((false, format!("{name}: {}", r.violations.first().map_or(String::new(), |v| v.relation.clone()))));
        }
        checked += r.checked;
    }
    Ok((true, format!("3 cases, {checked} checks")))
}

fn periodicity() -> Result<(bool, String)> {
    let cm = CartanMatrix::type_a(2);
    let mut periods = Vec::new();
    for seed in [10, 11, 12] {
        let scan = scan_period(&cm, SystemKind::Restricted { level: 2 }, 12, &mut rng(seed), Policy::default())?;
        periods.push(scan.period);
    }
    let pass = periods.iter().all(|p| p.is_some_and(|p| p <= 10));
    Ok((pass, format!("periods {periods:?}")))
}
