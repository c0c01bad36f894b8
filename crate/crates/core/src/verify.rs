//! Built-in verification suite: each check compares a measured quantity
//! with its reference value and tolerance.

use std::f64::consts::{FRAC_PI_2, LN_2, TAU};

use num_complex::Complex64;

use crate::channels::{self, DephasingRabiParams, DickeParams};
use crate::cohinfo::{coherent_information, joint_state, one_time_coherent_information};
use crate::numkit::{c, hermitian_eig, kron, partial_trace, CMatrix, Keep};
use crate::qstate::{conjugate_state, DensityMatrix};
use crate::random::{random_basis, random_density, random_povm, random_unitary, Rng64};
use crate::superop::{check_cp_tp, Superoperator};
use crate::sweep::{run_scenario, SweepRequest};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: String,
    pub expected: String,
    pub pass: bool,
}

/// Extra context printed after the checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Note {
    pub name: &'static str,
    pub text: String,
}

pub struct Report {
    pub checks: Vec<Check>,
    pub notes: Vec<Note>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for ch in &self.checks {
            out.push_str(&format!(
                "[{}] {}: measured {}, expected {}\n",
                if ch.pass { "PASS" } else { "FAIL" },
                ch.name,
                ch.measured,
                ch.expected
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("[NOTE] {}: {}\n", n.name, n.text));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.checks.len()));
        out
    }
}

fn check(name: &'static str, measured: String, expected: String, pass: bool) -> Check {
    Check {
        name,
        measured,
        expected,
        pass,
    }
}

fn ic(s: &Superoperator, rho: &DensityMatrix) -> f64 {
    coherent_information(s, rho).expect("catalog channel").i_c
}

fn raw_ic(s: &Superoperator, rho: &DensityMatrix) -> f64 {
    coherent_information(s, rho)
        .expect("catalog channel")
        .raw_ic
}

fn mixed() -> DensityMatrix {
    DensityMatrix::maximally_mixed(2)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn hydrogen_oracle() -> Check {
    let mut dev: f64 = 0.0;
    for x in grid(-1.0, 1.0, 101) {
        let s = channels::hydrogen_stark(x).unwrap();
        dev = dev.max((ic(&s, &mixed()) - channels::hydrogen_ic_analytic(x)).abs());
    }
    let top = [1.0, -1.0].map(|x| ic(&channels::hydrogen_stark(x).unwrap(), &mixed()));
    check(
        "hydrogen I_c vs closed form (101 x)",
        format!(
            "max dev {dev:.2e}; I_c(+1) {:.12}, I_c(-1) {:.12}",
            top[0], top[1]
        ),
        "dev <= 1e-9; I_c(±1) = 1".into(),
        dev <= 1e-9 && top.iter().all(|v| (v - 1.0).abs() <= 1e-9),
    )
}

fn hydrogen_average() -> (Check, Note) {
    let n = 1000;
    let mean = (0..n)
        .map(|k| {
            let x = (TAU * k as f64 / n as f64).sin();
            ic(&channels::hydrogen_stark(x).unwrap(), &mixed())
        })
        .sum::<f64>()
        / n as f64;
    let by_x = grid(-1.0, 1.0, 2001)
        .iter()
        .map(|&x| channels::hydrogen_ic_analytic(x))
        .sum::<f64>()
        / 2001.0;
    (
        check(
            "hydrogen time average over omega_s t in [0, 2pi)",
            format!("{mean:.4}"),
            "0.46 ± 0.01".into(),
            (mean - 0.46).abs() <= 0.01,
        ),
        Note {
            name: "hydrogen average",
            text: format!(
                "the closed form averaged uniformly over x = sin(omega_s t) in [-1, 1] gives {by_x:.4}"
            ),
        },
    )
}

fn hydrogen_joint_structure() -> Check {
    let mut dev: f64 = 0.0;
    for x in grid(-1.0, 1.0, 21) {
        let j = joint_state(&channels::hydrogen_stark(x).unwrap(), &mixed()).unwrap();
        let mut want = CMatrix::zeros(6, 6);
        want[(0, 0)] = c(0.5, 0.0);
        want[(0, 3)] = c(x / 2.0, 0.0);
        want[(3, 0)] = c(x / 2.0, 0.0);
        want[(3, 3)] = c(x * x / 2.0, 0.0);
        want[(5, 5)] = c((1.0 - x * x) / 2.0, 0.0);
        dev = dev.max(j.rho_alpha.matrix().max_abs_diff(&want));
        let eig = j.rho_alpha.eigenvalues().unwrap();
        let mut e = [(1.0 + x * x) / 2.0, (1.0 - x * x) / 2.0];
        e.sort_by(|a, b| b.total_cmp(a));
        dev = dev.max((eig[0] - e[0]).abs()).max((eig[1] - e[1]).abs());
        dev = dev.max(eig[2..].iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    check(
        "hydrogen joint state and its spectrum",
        format!("max dev {dev:.2e}"),
        "<= 1e-10".into(),
        dev <= 1e-10,
    )
}

fn atom_field_oracle() -> Check {
    let mut dev: f64 = 0.0;
    let mut eig_dev: f64 = 0.0;
    for gt in grid(0.0, 6.0, 101) {
        let s = channels::atom_field(gt).unwrap();
        let x = (-gt).exp();
        for r22 in [0.1, 0.5, 0.9] {
            let rho = DensityMatrix::diagonal(&[1.0 - r22, r22]).unwrap();
            let r = coherent_information(&s, &rho).unwrap();
            dev = dev.max((r.i_c - channels::atom_field_ic_analytic(x, r22)).abs());
            let mut want = [0.0, 0.0, 1.0 - r22 * x, r22 * x];
            want.sort_by(|a, b| b.total_cmp(a));
            for (g, w) in r.eig_alpha.iter().zip(&want) {
                eig_dev = eig_dev.max((g - w).abs());
            }
        }
    }
    check(
        "atom-field I_c and joint spectrum vs closed form (101 x 3)",
        format!("I_c dev {dev:.2e}, eigenvalue dev {eig_dev:.2e}"),
        "<= 1e-9, <= 1e-10".into(),
        dev <= 1e-9 && eig_dev <= 1e-10,
    )
}

/// Root in `x = exp(-γt)` of the numeric raw I_c, by bisection on (0, 1).
pub fn atom_field_sign_change(rho22: f64) -> f64 {
    let f = |x: f64| {
        let s = channels::atom_field(-x.ln()).unwrap();
        raw_ic(&s, &DensityMatrix::diagonal(&[1.0 - rho22, rho22]).unwrap())
    };
    let (mut lo, mut hi) = (0.05, 0.95);
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn atom_field_critical_point() -> Check {
    let roots: Vec<f64> = [0.1, 0.5, 0.9]
        .iter()
        .map(|&r| atom_field_sign_change(r))
        .collect();
    let worst = roots.iter().fold(0.0f64, |m, r| m.max((r - 0.5).abs()));
    check(
        "atom-field raw I_c sign change in exp(-gamma t)",
        format!(
            "roots {}",
            roots
                .iter()
                .map(|r| format!("{r:.9}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        "0.5 ± 1e-6".into(),
        worst <= 1e-6,
    )
}

fn atom_field_one_time() -> Check {
    let excited = DensityMatrix::basis_state(2, 1);
    let mut dev: f64 = 0.0;
    for gt in grid(0.05, 6.0, 25) {
        let x = (-gt).exp();
        let joint = channels::atom_field_joint_state(gt, &excited).unwrap();
        let got = one_time_coherent_information(&joint, (2, 2)).unwrap();
        dev = dev.max((got - channels::binary_entropy(x)).abs());
    }
    let at_half = one_time_coherent_information(
        &channels::atom_field_joint_state(LN_2, &excited).unwrap(),
        (2, 2),
    )
    .unwrap();
    check(
        "atom-field one-time I_c for the excited atom",
        format!("{at_half:.12} at x = 1/2; max dev from binary entropy {dev:.2e}"),
        "1 ± 1e-9".into(),
        (at_half - 1.0).abs() <= 1e-9 && dev <= 1e-9,
    )
}

fn measurement_nullity() -> Check {
    let mut rng = Rng64::seeded(0x6d65_6173);
    let mut worst: f64 = 0.0;
    let mut channels_tested = vec![
        channels::direct_measurement(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap(),
        channels::indirect_measurement(
            &channels::pointer_projectors(2),
            &channels::pointer_projectors(2),
        )
        .unwrap(),
        channels::indirect_measurement(&channels::pointer_projectors(3), &channels::trine_povm())
            .unwrap(),
    ];
    for _ in 0..20 {
        channels_tested.push(channels::direct_measurement(&random_basis(&mut rng, 2)).unwrap());
        let outcomes = 1 + rng.index(4);
        let povm = random_povm(&mut rng, 2, outcomes);
        channels_tested.push(
            channels::indirect_measurement(&channels::pointer_projectors(outcomes), &povm).unwrap(),
        );
    }
    for s in &channels_tested {
        for _ in 0..20 {
            worst = worst.max(ic(s, &random_density(&mut rng, 2)));
        }
    }
    check(
        "measurement channels carry no coherent information",
        format!(
            "max I_c {worst:.2e} over {} channels x 20 inputs",
            channels_tested.len()
        ),
        "<= 1e-9".into(),
        worst <= 1e-9,
    )
}

fn duplication_identity() -> Check {
    let mut rng = Rng64::seeded(0x0064_7570);
    let (mut se, mut gap, mut marg): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let basis = random_basis(&mut rng, 2);
        let rho = random_density(&mut rng, 2);
        let dup = channels::duplication(&basis, 2).unwrap();
        let r = coherent_information(&dup, &rho).unwrap();
        se = se.max(r.s_e);
        gap = gap.max((r.i_c - r.s_in).abs());
        let out = dup.apply(&rho).unwrap();
        let meas = channels::direct_measurement(&basis)
            .unwrap()
            .apply(&rho)
            .unwrap();
        for keep in [Keep::First, Keep::Second] {
            let m = partial_trace(out.matrix(), (2, 2), keep).unwrap();
            marg = marg.max(m.max_abs_diff(meas.matrix()));
        }
    }
    check(
        "duplication: S_e = 0, I_c = S_in, marginals are measurements",
        format!("S_e {se:.2e}, |I_c - S_in| {gap:.2e}, marginal dev {marg:.2e}"),
        "<= 1e-9, <= 1e-9, <= 1e-10".into(),
        se <= 1e-9 && gap <= 1e-9 && marg <= 1e-10,
    )
}

fn coupled_tlas() -> Check {
    let ground = DensityMatrix::basis_state(2, 0);
    let full = ic(
        &channels::coupled_tlas(&channels::exchange_unitary(FRAC_PI_2), &ground).unwrap(),
        &mixed(),
    );
    let mut rng = Rng64::seeded(0x0074_6c61);
    let mut product: f64 = 0.0;
    for _ in 0..10 {
        let u = kron(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 2));
        let s = channels::coupled_tlas(&u, &random_density(&mut rng, 2)).unwrap();
        product = product.max(ic(&s, &random_density(&mut rng, 2)));
    }
    let scan: Vec<f64> = grid(0.0, 1.0, 11)
        .iter()
        .map(|&r| {
            let rho2 = channels::pure_qubit(r).unwrap();
            let s = channels::coupled_tlas(&channels::exchange_unitary(FRAC_PI_2), &rho2).unwrap();
            raw_ic(&s, &mixed())
        })
        .collect();
    let border = scan[0].max(scan[10]);
    let interior = scan[1..10].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    check(
        "coupled atoms: full exchange, product unitary, border maximum",
        format!("I_c {full:.12}; product max {product:.2e}; border {border:.6} vs interior {interior:.6}"),
        "1 ± 1e-9; 0; border >= interior".into(),
        (full - 1.0).abs() <= 1e-9 && product <= 1e-12 && border >= interior,
    )
}

fn dephasing_spectrum() -> Check {
    let mut dev: f64 = 0.0;
    for (g, o) in [(1.0, 0.0), (1.0, 0.5), (1.0, 2.0)] {
        let a = channels::liouvillian_analysis(g, o).unwrap();
        let mut want = channels::liouvillian_eigenvalues_closed_form(g, o).to_vec();
        want.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        for w in &want {
            let nearest = a
                .eigenvalues
                .iter()
                .map(|z| (z - w).norm())
                .fold(f64::INFINITY, f64::min);
            dev = dev.max(nearest);
        }
    }
    check(
        "dephasing Liouvillian eigenvalues vs closed form",
        format!("max dev {dev:.2e}"),
        "<= 1e-10".into(),
        dev <= 1e-10,
    )
}

fn dephasing_behaviour() -> Check {
    let ic_at = |o: f64, t: f64| {
        ic(
            &channels::dephasing_rabi(DephasingRabiParams {
                gamma: 1.0,
                omega: o,
                t,
            })
            .unwrap(),
            &mixed(),
        )
    };
    let start = ic_at(2.0, 0.0);
    let mut monotone = true;
    for t in [0.2, 0.5, 1.0] {
        let v: Vec<f64> = [0.0, 1.0, 2.0, 4.0].iter().map(|&o| ic_at(o, t)).collect();
        monotone &= v.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    }
    let ratio = |d: f64| (ic_at(0.0, 0.0) - ic_at(0.0, d)) / d;
    let (r3, r2) = (ratio(1e-3), ratio(1e-2));
    check(
        "dephasing: I_c(0) = 1, decreasing in Omega, slope blow-up at t -> 0",
        format!(
            "I_c(0) {start:.12}; monotone {monotone}; slope {r3:.3} at 1e-3 vs {r2:.3} at 1e-2"
        ),
        "1; true; first > second".into(),
        (start - 1.0).abs() <= 1e-12 && monotone && r3 > r2,
    )
}

fn dicke_without_shift() -> Check {
    let mut worst_ic: f64 = 0.0;
    let mut worst_n2: f64 = 0.0;
    for phi in [0.3, 0.5, 1.0, 2.0, 3.0] {
        for gt in grid(0.0, 6.0, 61) {
            let p = DickeParams::without_shift(phi, gt);
            let s = channels::two_atom_channel(&p).unwrap();
            for r22 in [0.1, 0.5, 0.9] {
                worst_ic =
                    worst_ic.max(ic(&s, &DensityMatrix::diagonal(&[1.0 - r22, r22]).unwrap()));
            }
            worst_n2 = worst_n2.max(channels::two_atom_population(&p).unwrap());
        }
    }
    check(
        "two atoms without dipole shift: no transfer of coherent information",
        format!("max I_c {worst_ic:.2e}, max n2 {worst_n2:.6}"),
        "0, <= 0.25".into(),
        worst_ic <= 1e-12 && worst_n2 <= 0.25 + 1e-12,
    )
}

/// Number of strict interior local maxima.
pub fn local_maxima(v: &[f64]) -> usize {
    v.windows(3).filter(|w| w[1] > w[0] && w[1] >= w[2]).count()
}

fn dicke_with_shift() -> Check {
    let times = grid(0.005, 4.0, 800);
    let half = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
    let mut best: f64 = 0.0;
    let mut n2 = Vec::with_capacity(times.len());
    for &gt in &times {
        let p = DickeParams::new(0.5, gt);
        best = best.max(ic(&channels::two_atom_channel(&p).unwrap(), &half));
        n2.push(channels::two_atom_population(&p).unwrap());
    }
    let peaks = local_maxima(&n2);
    check(
        "two atoms at phi = 0.5: positive I_c and oscillating n2",
        format!("max I_c {best:.6}, n2 local maxima {peaks}"),
        "> 0, >= 2".into(),
        best > 0.0 && peaks >= 2,
    )
}

/// Representative member of every catalog family over its parameter grid.
pub fn catalog_grid() -> Vec<(String, Superoperator)> {
    let mut out = Vec::new();
    for o in [0.0, 0.5, 1.0, 2.0, 4.0] {
        for t in grid(0.0, 1.5, 7) {
            let p = DephasingRabiParams {
                gamma: 1.0,
                omega: o,
                t,
            };
            out.push((
                format!("dephasing {o} {t}"),
                channels::dephasing_rabi(p).unwrap(),
            ));
        }
    }
    for x in grid(-1.0, 1.0, 21) {
        out.push((
            format!("hydrogen {x}"),
            channels::hydrogen_stark(x).unwrap(),
        ));
    }
    for th in grid(0.0, std::f64::consts::PI, 7) {
        for r in grid(0.0, 1.0, 5) {
            let s = channels::coupled_tlas(
                &channels::exchange_unitary(th),
                &channels::pure_qubit(r).unwrap(),
            )
            .unwrap();
            out.push((format!("coupled {th} {r}"), s));
        }
    }
    let mut rng = Rng64::seeded(0x6772_6964);
    for k in 0..5 {
        let basis = random_basis(&mut rng, 2);
        out.push((
            format!("direct {k}"),
            channels::direct_measurement(&basis).unwrap(),
        ));
        out.push((
            format!("duplication {k}"),
            channels::duplication(&basis, 2).unwrap(),
        ));
        let q = 1 + k % 4;
        let povm = random_povm(&mut rng, 2, q);
        let s = channels::indirect_measurement(&channels::pointer_projectors(q), &povm).unwrap();
        out.push((format!("indirect {k}"), s));
    }
    out.push((
        "trine".into(),
        channels::indirect_measurement(&channels::pointer_projectors(3), &channels::trine_povm())
            .unwrap(),
    ));
    for gt in grid(0.0, 6.0, 13) {
        out.push((
            format!("atom-field {gt}"),
            channels::atom_field(gt).unwrap(),
        ));
    }
    for phi in grid(0.3, 3.0, 7) {
        for gt in grid(0.0, 4.0, 9) {
            for p in [
                DickeParams::new(phi, gt),
                DickeParams::without_shift(phi, gt),
            ] {
                out.push((
                    format!("two-atoms {phi} {gt}"),
                    channels::two_atom_channel(&p).unwrap(),
                ));
            }
        }
    }
    out
}

fn structural() -> Check {
    let catalog = catalog_grid();
    let mut failures = Vec::new();
    let mut marg: f64 = 0.0;
    let mut rng = Rng64::seeded(0x7374_7275);
    for (name, s) in &catalog {
        let r = check_cp_tp(s, 1e-9);
        if !(r.cp && r.tp) {
            failures.push(name.clone());
        }
        let rho = random_density(&mut rng, s.dim_in());
        let j = joint_state(s, &rho).unwrap();
        let out = s.apply(&rho).unwrap();
        marg = marg.max(j.output_marginal().max_abs_diff(out.matrix()));
        marg = marg.max(
            j.input_marginal()
                .max_abs_diff(conjugate_state(&rho).matrix()),
        );
    }
    let csv_ok = ["dephasing", "two-atoms", "atom-field"].iter().all(|sc| {
        let mut req = SweepRequest {
            scenario: Some(sc.to_string()),
            ..Default::default()
        };
        req.steps = Some(12);
        let spec = req.resolve().unwrap();
        let a = run_scenario(&spec, Some(1)).unwrap();
        a == run_scenario(&spec, Some(4)).unwrap() && a == run_scenario(&spec, None).unwrap()
    });
    check(
        "catalog CP/TP, joint-state marginals, CSV determinism",
        format!(
            "{} of {} channels fail CP/TP; marginal dev {marg:.2e}; CSV identical {csv_ok}",
            failures.len(),
            catalog.len()
        ),
        "0 failures; <= 1e-9; true".into(),
        failures.is_empty() && marg <= 1e-9 && csv_ok,
    )
}

fn dicke_normalization() -> Check {
    let mut dev: f64 = 0.0;
    for phi in grid(0.3, 3.0, 64) {
        for gt in grid(0.0, 4.0, 64) {
            let a = channels::dicke_amplitudes(&DickeParams::new(phi, gt)).unwrap();
            dev = dev.max((a.f * a.f + a.f_s.norm_sqr() + a.f_a.norm_sqr() - 1.0).abs());
        }
    }
    check(
        "two-atom amplitudes normalized on the 64 x 64 grid",
        format!("max dev {dev:.2e}"),
        "<= 1e-10".into(),
        dev <= 1e-10,
    )
}

fn identity_channel() -> Check {
    let s = Superoperator::identity(2);
    let j = joint_state(&s, &mixed()).unwrap();
    let bell: Vec<Complex64> = [1.0, 0.0, 0.0, 1.0]
        .iter()
        .map(|&v| c(v / 2f64.sqrt(), 0.0))
        .collect();
    let dev = j
        .rho_alpha
        .matrix()
        .max_abs_diff(&CMatrix::outer(&bell, &bell));
    let eig = hermitian_eig(j.rho_alpha.matrix(), 1e-12).unwrap();
    let value = ic(&s, &mixed());
    check(
        "identity channel on I/2: Bell joint state, 1 bit",
        format!(
            "joint dev {dev:.2e}, top eigenvalue {:.12}, I_c {value:.12}",
            eig.values[0]
        ),
        "0, 1, 1".into(),
        dev <= 1e-12 && (value - 1.0).abs() <= 1e-12,
    )
}

pub fn run() -> Report {
    let (avg, avg_note) = hydrogen_average();
    let checks = vec![
        identity_channel(),
        hydrogen_oracle(),
        avg,
        hydrogen_joint_structure(),
        atom_field_oracle(),
        atom_field_critical_point(),
        atom_field_one_time(),
        measurement_nullity(),
        duplication_identity(),
        coupled_tlas(),
        dephasing_spectrum(),
        dephasing_behaviour(),
        dicke_without_shift(),
        dicke_with_shift(),
        dicke_normalization(),
        structural(),
    ];
    let notes = if checks[2].pass {
        vec![]
    } else {
        vec![avg_note]
    };
    Report { checks, notes }
}
