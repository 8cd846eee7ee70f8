use cvmdi_core::calibration::{
    self, apply_rin_transform, expected_estimates, invert_monitor, monitor_moments, resolve_at, resolve_parameters,
    scan_coupled_params, simulate_channel_data, simulate_channel_stats, simulate_monitor_stats, stream_rng,
    ChannelModel, RegressionStats, RinModel, ScanGrid,
};
use cvmdi_core::keyrate::{evaluate, Scenario};
use cvmdi_core::oracle::build_circuit_oracle;
use cvmdi_core::protocol::{eps_s_from_v_s, CaseId, Side};
use cvmdi_core::{AttackModel, PeMode, Quadrature, TrustedSetup};

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

fn default_point(case: CaseId) -> (TrustedSetup, cvmdi_core::ChannelParams) {
    let sc = Scenario::default();
    let setup = calibration::trusted_setup(case, &sc.params, RinModel::Realistic).unwrap();
    (setup, sc.channel_at(18.0).unwrap())
}

#[test]
fn rin_transform_rescales_variance() {
    let mut rng = stream_rng(1, 0);
    let n = 1_000_000;
    let raw: Vec<f64> = {
        let data = simulate_channel_data(
            &ChannelModel { var_x: 4.0, t1: 0.0, t2: 0.0, sigma1_sq: 1.0, sigma2_sq: 1.0 },
            n,
            &mut rng,
        )
        .unwrap();
        data.x1
    };
    let out = apply_rin_transform(&raw, 1.4, &mut rng).unwrap();
    let expected: f64 = 4.0 / 1.4 + 1.0 - 1.0 / 1.4;
    assert!((expected - 3.142857).abs() < 1e-6);
    let var = sample_variance(&out);
    let se = expected * (2.0 / n as f64).sqrt();
    assert!((var - expected).abs() < 3.0 * se, "{var} vs {expected}");

    assert_eq!(apply_rin_transform(&raw[..10], 1.0, &mut rng).unwrap(), raw[..10].to_vec());
    assert!(apply_rin_transform(&raw, 0.9, &mut rng).is_err());
}

#[test]
fn channel_outputs_have_model_variance() {
    let (setup, channel) = default_point(CaseId::Both);
    let model = ChannelModel::new(&setup, &channel);
    let data = simulate_channel_data(&model, 400_000, &mut stream_rng(2, 0)).unwrap();
    for (y, t, s) in [(&data.y1, model.t1, model.sigma1_sq), (&data.y2, model.t2, model.sigma2_sq)] {
        let want = t * t * model.var_x + s;
        let got = sample_variance(y);
        assert!((got / want - 1.0).abs() < 3.0 * (2.0 / 400_000f64).sqrt() * 1.5, "{got} vs {want}");
    }
}

#[test]
fn stored_and_streamed_estimates_agree() {
    let (setup, channel) = default_point(CaseId::AliceOnly);
    let model = ChannelModel::new(&setup, &channel);
    let data = simulate_channel_data(&model, 5_000, &mut stream_rng(3, 0)).unwrap();
    let stats = simulate_channel_stats(&model, 5_000, &mut stream_rng(3, 0)).unwrap();
    let a = calibration::ml_estimators(&data).unwrap();
    let b = calibration::estimates_from_stats(&stats).unwrap();
    assert!((a.t1.value - b.t1.value).abs() < 1e-12);
    assert!((a.sigma2_sq.value - b.sigma2_sq.value).abs() < 1e-10);

    let mut halves = RegressionStats::from_pairs(&data.x1[..2500], &data.y1[..2500]).unwrap();
    halves.merge(&RegressionStats::from_pairs(&data.x1[2500..], &data.y1[2500..]).unwrap());
    assert!((halves.estimate().unwrap().0.value - a.t1.value).abs() < 1e-12);
}

#[test]
fn noise_estimator_bias_is_one_over_m() {
    let (setup, channel) = default_point(CaseId::Both);
    let model = ChannelModel::new(&setup, &channel);
    let m = 20u64;
    let trials = 20_000;
    let mut sum = 0.0;
    for k in 0..trials {
        let stats = simulate_channel_stats(&model, m, &mut stream_rng(4, k)).unwrap();
        sum += stats[0].estimate().unwrap().1.value;
    }
    let mean = sum / trials as f64;
    let expected = model.sigma1_sq * (m as f64 - 1.0) / m as f64;
    let se = model.sigma1_sq * (2.0 / (m as f64 * trials as f64)).sqrt();
    assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected}");
}

#[test]
fn monitor_moments_match_circuit() {
    // The circuit needs a lossy link on both sides.
    let (setup, _) = default_point(CaseId::Both);
    let channel = cvmdi_core::ChannelParams::new(0.6, 0.8, 0.01, 0.01).unwrap();
    let attack = channel.attack(AttackModel::NegativeEpr).unwrap();
    let oracle = build_circuit_oracle(CaseId::Both, &setup, &channel, &attack).unwrap();
    for (side, a1, m3) in [(Side::A, "A1", "M3"), (Side::B, "B1", "K3")] {
        let mm = monitor_moments(&setup, side).unwrap();
        let block = oracle.global.block(a1, m3).unwrap();
        assert!((block[(0, 0)] - mm.cross_x).abs() < 1e-9);
        assert!((block[(1, 1)] - mm.cross_p).abs() < 1e-9);
        assert!((oracle.global.variance(m3, Quadrature::X).unwrap() - mm.var_m3).abs() < 1e-9);
    }
    let (untrusted, _) = default_point(CaseId::Untrusted);
    assert!(monitor_moments(&untrusted, Side::A).is_err());
}

#[test]
fn monitor_inversion_is_unbiased_with_predicted_spread() {
    let (setup, _) = default_point(CaseId::AliceOnly);
    let truth = eps_s_from_v_s(setup.t_s, setup.v_s);
    let m = 200_000u64;
    let predicted = calibration::expected_eps_s(&setup, Side::A, m as f64).unwrap();
    let values: Vec<f64> = (0..64)
        .map(|k| {
            let stats = simulate_monitor_stats(&setup, Side::A, m, &mut stream_rng(9, k)).unwrap();
            invert_monitor(&stats, setup.v).unwrap().value
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let sd = sample_variance(&values).sqrt();
    assert!((mean - truth).abs() < 4.0 * predicted.std_error / 8.0, "{mean} vs {truth}");
    assert!((sd / predicted.std_error - 1.0).abs() < 0.3, "{sd} vs {}", predicted.std_error);
}

#[test]
fn resolution_round_trips_the_true_point() {
    for case in CaseId::ALL {
        let (setup, channel) = default_point(case);
        let est = expected_estimates(case, &setup, &channel, 1e7).unwrap();
        let (s, c) = resolve_parameters(case, &est, &setup).unwrap();
        assert!((c.eta_a - channel.eta_a).abs() < 1e-12);
        assert!((c.eta_b - channel.eta_b).abs() < 1e-12);
        assert!((c.epsilon_1 - channel.epsilon_1).abs() < 1e-10);
        assert!((s.v_s - setup.v_s).abs() < 1e-9, "{case}");
    }
}

#[test]
fn resolution_rejects_supra_unit_transmittance() {
    let (setup, channel) = default_point(CaseId::Both);
    let est = expected_estimates(CaseId::Both, &setup, &channel, 1e7).unwrap();
    let t_s = est.t2.value / setup.t_k * 0.5;
    assert!(resolve_at(CaseId::Both, &est, &setup, t_s).is_err());
}

#[test]
fn scan_grids() {
    assert_eq!(ScanGrid::default().points().len(), 100);
    assert_eq!(ScanGrid::single(0.97).points(), vec![0.97]);

    let case = CaseId::Both;
    let (setup, channel) = default_point(case);
    let sc = Scenario::default();
    let est = expected_estimates(case, &setup, &channel, 1e7).unwrap();
    let scan = |grid: ScanGrid| {
        scan_coupled_params(case, &est, &setup, &grid, AttackModel::NegativeEpr, 1.0, &sc.fs, PeMode::Ideal).unwrap()
    };

    let single = scan(ScanGrid::single(setup.t_s));
    let direct = evaluate(
        case,
        &setup,
        &channel,
        &channel.attack(AttackModel::NegativeEpr).unwrap(),
        1.0,
        &sc.fs,
        PeMode::Ideal,
    )
    .unwrap();
    assert!((single.rate.rate - direct.rate).abs() < 1e-9);
    assert_eq!(single.feasible_points, 1);

    let coarse = scan(ScanGrid { from: 0.9, to: 1.0, step: 1e-2 });
    let fine = scan(ScanGrid { from: 0.9, to: 1.0, step: 1e-3 });
    assert!(fine.rate.rate <= coarse.rate.rate + 1e-12);
    assert!(fine.rate.rate <= direct.rate + 1e-9);
    assert!(fine.feasible_points > coarse.feasible_points);
}
