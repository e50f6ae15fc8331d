use std::time::Instant;

use loopgas_core::code::{build_ising_rect, build_ising_torus, build_toric_4d, CodeSpec, Sector};
use loopgas_core::decoder::DecoderConfig;
use loopgas_core::dynamics::{
    assemble_block, conditional_block_step, exact_block_branches, BlockOutcome, ChainState,
    SamplerMode,
};
use loopgas_core::experiments::escape::{censored_median, escape_times};
use loopgas_core::experiments::mixing::{reference_energy_band, sweeps_to_band};
use loopgas_core::experiments::ssm::{
    fit_log_slope, ssm_exact_discrepancy, wsm_coupled_estimate, SsmRegions,
};
use loopgas_core::gf2::BitVector;
use loopgas_core::ChainKind;

#[test]
fn probe_11a_domain_ssm_4x4() {
    let code = build_ising_torus(4, 2).unwrap();
    let net = code.network();
    let m = code.num_checks();
    let u = 0usize;
    let b = net.ball(&[u], 3);
    println!("ball(u,3) size = {} of {}", b.weight(), m);
    let mut a = BitVector::zeros(m);
    a.set(u, true);
    for k in 1..=3 {
        let c = net.boundary(&[u], k - 1, 1).and(&b);
        let t = Instant::now();
        let regions = SsmRegions::new(b.clone(), a.clone(), c.clone()).unwrap();
        let disc = ssm_exact_discrepancy(&code, 2.0, &regions).unwrap();
        println!(
            "k={k} |C|={} disc={disc:.6e} ({:?})",
            c.weight(),
            t.elapsed()
        );
    }
}

#[test]
fn probe_11b_coupled_strip() {
    let code = build_ising_rect(8, 32).unwrap();
    let m = code.num_checks();
    println!("strip checks = {m}");
    let u = 200usize; // some bulk edge
    for &(beta, sweeps) in &[(1.5f64, 300_000u64), (2.5, 1_000_000)] {
        let mut pts = Vec::new();
        for r in 1..=3usize {
            let t = Instant::now();
            let est = wsm_coupled_estimate(&code, beta, u, r, sweeps, 2_000, 71, r as u64);
            println!(
                "beta={beta} r={r} diff={:.3e} disagree={:.3e} ({:?})",
                est.difference,
                est.disagreement,
                t.elapsed()
            );
            pts.push((r, est.disagreement));
        }
        println!("beta={beta} slope={:?}", fit_log_slope(&pts));
    }
}

#[test]
fn probe_10_escape_medians() {
    let code = build_ising_torus(12, 2).unwrap();
    let dcfg = DecoderConfig::default();
    for &beta in &[0.8f64, 1.2, 1.6] {
        let t = Instant::now();
        let times = escape_times(
            &code,
            beta,
            2,
            SamplerMode::Exact,
            &dcfg,
            6,
            200_000,
            20,
            81,
            0,
        );
        let med = censored_median(&times, 200_000);
        let none = times.iter().filter(|x| x.is_none()).count();
        println!("beta={beta} median={med} censored={none} ({:?})", t.elapsed());
    }
}

#[test]
fn probe_9_band_and_block() {
    let code = build_ising_torus(16, 2).unwrap();
    let dcfg = DecoderConfig::default();
    let t = Instant::now();
    let band = reference_energy_band(
        &code,
        2.0,
        ChainKind::Syndrome,
        &dcfg,
        10,
        100_000,
        200,
        91,
        0,
    );
    println!("band (burn 1e5) = [{:.6e}, {:.6e}] ({:?})", band.lo, band.hi, t.elapsed());
    let t = Instant::now();
    let kind = ChainKind::Block {
        radius: 2,
        mode: SamplerMode::Exact,
    };
    let hit = sweeps_to_band(&code, 2.0, kind, &dcfg, band, 200, 1_500, 91, 100);
    println!("block sweeps to band = {hit:?} ({:?})", t.elapsed());
}

#[test]
fn probe_5_toric_blocks() {
    let code = CodeSpec::Toric4d {
        w: 3,
        sector: Sector::X,
    }
    .build()
    .unwrap();
    println!(
        "toric w=3 X: n={} m={} meta={}",
        code.num_symbols(),
        code.num_checks(),
        code.num_metachecks()
    );
    let zero = BitVector::zeros(code.num_checks());
    for radius in [1usize, 2] {
        let spec = assemble_block(&code, &zero, 0, radius);
        let t = Instant::now();
        let dcfg = DecoderConfig::default();
        let branches = exact_block_branches(&code, &zero, 0, radius, 2.0, &dcfg);
        println!(
            "radius {radius}: ball={} interior={} branches={} ({:?})",
            spec.ball.weight(),
            spec.interior.weight(),
            branches.len(),
            t.elapsed()
        );
    }
}

#[test]
fn probe_8_block_step_timing() {
    use loopgas_core::dynamics::{conditional_block_step, ChainState};
    let dcfg = DecoderConfig::default();
    let ising = build_ising_torus(16, 2).unwrap();
    let mut st = ChainState::new(&ising, 1, 0);
    let t = Instant::now();
    for _ in 0..2_000 {
        conditional_block_step(&mut st, 2.0, 2, SamplerMode::Exact, &dcfg);
    }
    println!("ising 16x16 r2: {:?} for 2000 steps", t.elapsed());
    let toric = CodeSpec::Toric4d {
        w: 3,
        sector: Sector::X,
    }
    .build()
    .unwrap();
    let mut st = ChainState::new(&toric, 1, 0);
    let t = Instant::now();
    for _ in 0..2_000 {
        conditional_block_step(&mut st, 2.0, 2, SamplerMode::Exact, &dcfg);
    }
    println!("toric w3 r2: {:?} for 2000 steps", t.elapsed());
}

#[test]
fn probe_toric_face_geometry() {
    let code = CodeSpec::Toric4d {
        w: 3,
        sector: Sector::X,
    }
    .build()
    .unwrap();
    let net = code.network();
    let ball = net.ball(&[0], 2);
    // Faces incident to edge 0 and where their boundary edges sit.
    for f in 0..code.num_symbols() {
        let checks = code.symbol_checks(f);
        if checks.contains(&0) {
            let dists: Vec<u32> = {
                let d = net.distances_within(&[0], 10);
                checks.iter().map(|&c| d[c]).collect()
            };
            let inside = checks.iter().all(|&c| ball.get(c));
            println!("face {f}: edges {checks:?} dists {dists:?} inside_ball2={inside}");
        }
    }
    let basis = code.local_valid_basis(&ball);
    println!("ball2 size {} basis dim {}", ball.weight(), basis.len());
    let ball3 = net.ball(&[0], 3);
    let basis3 = code.local_valid_basis(&ball3);
    println!("ball3 size {} basis dim {}", ball3.weight(), basis3.len());
}

#[test]
fn probe_toric_modes() {
    use loopgas_core::dynamics::{conditional_block_step, BlockOutcome, ChainState};
    let code = CodeSpec::Toric4d {
        w: 3,
        sector: Sector::X,
    }
    .build()
    .unwrap();
    let dcfg = DecoderConfig::default();
    // Radius 1 exact: identity action expected.
    let mut st = ChainState::new(&code, 1, 0);
    let t = Instant::now();
    let mut aborted = 0u64;
    for _ in 0..2_000 {
        if matches!(
            conditional_block_step(&mut st, 2.0, 1, SamplerMode::Exact, &dcfg),
            BlockOutcome::Aborted(_)
        ) {
            aborted += 1;
        }
    }
    println!(
        "toric r1 exact: {:?}/2000 steps, aborted={aborted}, energy={}",
        t.elapsed(),
        st.energy()
    );
    // Radius 2 nested-glauber companion.
    let mut st = ChainState::new(&code, 1, 1);
    let t = Instant::now();
    let mut aborted = 0u64;
    for _ in 0..2_000 {
        if matches!(
            conditional_block_step(
                &mut st,
                2.0,
                2,
                SamplerMode::NestedGlauber { sweeps: 2 },
                &dcfg
            ),
            BlockOutcome::Aborted(_)
        ) {
            aborted += 1;
        }
    }
    println!(
        "toric r2 nested: {:?}/2000 steps, aborted={aborted}, energy={}",
        t.elapsed(),
        st.energy()
    );
}

#[test]
fn probe_11b_final() {
    let code = build_ising_rect(8, 32).unwrap();
    let u = 200usize;
    for (bi, (beta, sweeps)) in [(1.5f64, 600_000u64), (2.5, 4_000_000)].iter().enumerate() {
        let mut pts = Vec::new();
        for r in 1..=3usize {
            let t = Instant::now();
            let est = wsm_coupled_estimate(
                &code,
                *beta,
                u,
                r,
                *sweeps,
                10_000,
                2026,
                (10 * bi + r) as u64,
            );
            println!(
                "beta={beta} r={r} disagree={:.3e} ({:?})",
                est.disagreement,
                t.elapsed()
            );
            pts.push((r, est.disagreement));
        }
        println!("beta={beta} slope={:?}", fit_log_slope(&pts));
    }
}

#[test]
fn probe_11b_r3_rate() {
    let code = build_ising_rect(8, 32).unwrap();
    let t = Instant::now();
    let est = wsm_coupled_estimate(&code, 2.5, 200, 3, 24_000_000, 10_000, 2026, 13);
    println!(
        "beta=2.5 r=3 sweeps=2.4e7 disagree={:.3e} events={} ({:?})",
        est.disagreement,
        (est.disagreement * 24_000_000.0).round(),
        t.elapsed()
    );
}

#[test]
fn probe_11b_r12_short() {
    let code = build_ising_rect(8, 32).unwrap();
    for r in [1usize, 2] {
        let est = wsm_coupled_estimate(&code, 2.5, 200, r, 1_000_000, 10_000, 2026, 20 + r as u64);
        println!("beta=2.5 r={r} sweeps=1e6 disagree={:.3e}", est.disagreement);
    }
}

#[test]
#[ignore]
fn probe_c8_toric_abort_messages() {
    let code = build_toric_4d(3).unwrap().x_sector;
    let dcfg = DecoderConfig::default();
    let mode = SamplerMode::NestedGlauber { sweeps: 2 };
    let mut tally: std::collections::HashMap<String, u64> = std::collections::HashMap::new();
    let mut total_aborts = 0u64;
    for r in 0..100u64 {
        let mut state = ChainState::new(&code, 808, r);
        for _ in 0..10_000u64 {
            if let BlockOutcome::Aborted(msg) = conditional_block_step(&mut state, 2.0, 2, mode, &dcfg) {
                total_aborts += 1;
                let key: String = msg.chars().take(120).collect();
                *tally.entry(key).or_insert(0) += 1;
            }
        }
        if r % 20 == 19 {
            println!("  ...through stream {r}: {total_aborts} aborts so far");
        }
    }
    println!("total aborts: {total_aborts}");
    for (msg, n) in &tally {
        println!("  [{n}x] {msg}");
    }
}
