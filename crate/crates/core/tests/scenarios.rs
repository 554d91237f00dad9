use msc3::cli::methods::{run_method, Method};
use msc3::metrics::{ari, labels_from_sets};
use msc3::msc::msc_mode;
use msc3::pipeline::{run_msc, run_msc_dbscan};
use msc3::synth::{generate, Component, SynthSpec};
use msc3::{Error, IndexSet, Mode, MscConfig, Tensor3};

const EPS: f64 = 0.001;

fn blocks(gammas: &[f64], seed: u64) -> (Tensor3, msc3::synth::GroundTruth) {
    generate(&SynthSpec::leading_blocks([50, 50, 50], gammas, 10, seed, 1.0).unwrap()).unwrap()
}

#[test]
fn rank_one_cluster_stays_inside_planted_block() {
    for seed in 0..10 {
        let (t, _) = blocks(&[80.0], seed);
        let modes = run_msc(&t, EPS, &MscConfig::default()).unwrap();
        for m in &modes {
            let j = m.result.cluster.indices();
            assert!(m.result.converged, "seed {seed} {}", m.result.mode);
            assert!(
                j.len() >= 7 && j.iter().all(|&i| i < 10),
                "seed {seed} {}: {j:?}",
                m.result.mode
            );
        }
    }
}

#[test]
fn separated_strengths_isolate_the_stronger_block() {
    let (t, _) = blocks(&[120.0, 60.0], 2);
    let strong: Vec<usize> = (0..10).collect();
    let config = MscConfig::default();
    let msc = run_msc(&t, EPS, &config).unwrap();
    for m in &msc {
        assert_eq!(m.result.cluster.indices(), strong.as_slice(), "{}", m.result.mode);
    }
    let (split, tri) = run_msc_dbscan(&t, EPS, &config).unwrap();
    for m in &split {
        assert_eq!(m.clusters.len(), 1);
        assert_eq!(m.clusters[0].indices(), strong.as_slice());
        assert!(m.noise.is_empty());
    }
    assert_eq!(tri.triclusters.len(), 1);
}

#[test]
fn iterated_msc_peels_both_blocks() {
    let (t, _) = blocks(&[120.0, 60.0], 2);
    let (modes, _) = run_method(&t, Method::MscIterated, EPS, &MscConfig::default()).unwrap();
    for m in &modes {
        assert!(m.clusters.len() >= 2, "{}: {:?}", m.mode, m.clusters);
        assert_eq!(m.clusters[0].indices(), (0..10).collect::<Vec<_>>().as_slice());
        let weak = m.clusters[1].indices();
        assert!(
            weak.len() >= 7 && weak.iter().all(|i| (10..20).contains(i)),
            "{}: {weak:?}",
            m.mode
        );
    }
}

#[test]
fn noiseless_two_blocks_split_cleanly() {
    let spec = SynthSpec::leading_blocks([30, 30, 30], &[50.0, 50.0], 6, 0, 0.0).unwrap();
    let (t, truth) = generate(&spec).unwrap();
    let (modes, tri) = run_msc_dbscan(&t, EPS, &MscConfig::default()).unwrap();
    for (m, want) in modes.iter().zip(&truth.labels) {
        let sets: Vec<Vec<usize>> = m.clusters.iter().map(|c| c.indices().to_vec()).collect();
        assert_eq!(ari(&labels_from_sets(&sets, 30).unwrap(), want).unwrap(), 1.0);
    }
    assert_eq!(tri.triclusters.len(), 2);
    for tc in &tri.triclusters {
        assert!((tc.score - 50.0 / 216f64.sqrt()).abs() < 1e-9);
    }
}

#[test]
fn zero_tensor_is_degenerate() {
    let t = Tensor3::zeros([6, 6, 6]).unwrap();
    assert!(matches!(
        msc_mode(&t, Mode::One, EPS, &MscConfig::default()),
        Err(Error::Degenerate(_))
    ));
    assert!(matches!(
        run_msc(&t, EPS, &MscConfig::default()),
        Err(Error::Degenerate(_))
    ));
    let (modes, tri) = run_msc_dbscan(&t, EPS, &MscConfig::default()).unwrap();
    assert!(modes
        .iter()
        .all(|m| m.failure.as_ref().is_some_and(|f| f.kind == "degenerate")));
    assert!(tri.triclusters.is_empty());
}

#[test]
fn overlapping_components_rejected() {
    let set = |m| IndexSet::new(m, vec![0, 1], 5).unwrap();
    let comp = Component {
        gamma: 1.0,
        members: Mode::ALL.map(set),
    };
    let spec = SynthSpec {
        dims: [5, 5, 5],
        components: vec![comp.clone(), comp],
        seed: 0,
        noise_scale: 1.0,
    };
    assert!(matches!(generate(&spec), Err(Error::Validation(_))));
}

#[test]
fn sequential_matches_parallel() {
    let (t, _) = blocks(&[80.0, 80.0], 5);
    let par = run_msc_dbscan(&t, EPS, &MscConfig::default()).unwrap();
    let seq = run_msc_dbscan(&t, EPS, &MscConfig::default().sequential()).unwrap();
    assert_eq!(par, seq);
}
