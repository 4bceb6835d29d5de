use graphabstract::graph::{ensure_connected, Graph};
use graphabstract::layout::{
    compute_layout, forceatlas2_raw, kamada_kawai_initial, kamada_kawai_raw, normalize,
    spectral_layout, spectral_layout_raw, stress, LayoutAlgorithm, Point,
};
use graphabstract::render::{render_image, RenderSpec, SKYBLUE};
use graphabstract::spectral::{combinatorial_laplacian, spectral_gap};
use graphabstract::spectral_gen::{
    gen_configuration_rewired, gen_sbm_evolution, sample_mu, MixingParam, SbmVariant,
};
use graphabstract::topology::block_model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Average ranks, ties sharing the mean rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn random_connected(n: usize, r: &mut ChaCha8Rng) -> Graph {
    let p = r.gen_range(0.08..0.4);
    ensure_connected(&block_model(&[n], p, 0.0, r), r).0
}

#[test]
fn low_mixing_gives_smaller_gaps() {
    let gap = |mu: f64, seed: u64| {
        let g = gen_sbm_evolution(
            40,
            MixingParam::new(mu).unwrap(),
            SbmVariant::Dumbbell,
            &mut rng(seed),
        )
        .unwrap();
        spectral_gap(&g.graph).unwrap().lambda2
    };
    let low: Vec<f64> = (0..50).map(|s| gap(0.05, s)).collect();
    let high: Vec<f64> = (0..50).map(|s| gap(0.6, 1000 + s)).collect();
    assert!(
        mean(&low) < mean(&high),
        "{} vs {}",
        mean(&low),
        mean(&high)
    );
}

#[test]
fn mixing_and_gap_are_rank_correlated() {
    let mut r = rng(31);
    let mut mus = Vec::new();
    let mut gaps = Vec::new();
    for _ in 0..300 {
        let mu = sample_mu(&mut r);
        let g = gen_sbm_evolution(r.gen_range(20..=50), mu, SbmVariant::Dumbbell, &mut r).unwrap();
        mus.push(mu.get());
        gaps.push(spectral_gap(&g.graph).unwrap().lambda2);
    }
    let rho = pearson(&ranks(&mus), &ranks(&gaps));
    assert!(rho > 0.3, "spearman {rho}");
}

#[test]
fn rewiring_usually_changes_the_gap() {
    let mut changed = 0;
    for seed in 0..50 {
        let mut r = rng(seed);
        let mu = sample_mu(&mut r);
        let out = gen_configuration_rewired(40, mu, &mut r).unwrap();
        let base_gap = spectral_gap(&ensure_connected(&out.base, &mut r).0)
            .unwrap()
            .lambda2;
        let new_gap = spectral_gap(&out.result.graph).unwrap().lambda2;
        if (base_gap - new_gap).abs() > 1e-9 {
            changed += 1;
        }
    }
    assert!(changed >= 35, "{changed}/50");
}

#[test]
fn kamada_kawai_never_increases_stress() {
    let mut r = rng(41);
    for _ in 0..50 {
        let g = random_connected(r.gen_range(3..=40), &mut r);
        let before = stress(&g, &kamada_kawai_initial(&g));
        let after = stress(&g, &kamada_kawai_raw(&g));
        assert!(after <= before + 1e-12, "{after} > {before}");
    }
}

fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let s = points
        .iter()
        .fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
    [s[0] / n, s[1] / n]
}

#[test]
fn forceatlas2_pushes_joined_cliques_apart() {
    let mut g = Graph::complete(8).disjoint_union(&Graph::complete(8));
    g.add_edge(7, 8);
    let gap = |iterations| {
        let p = forceatlas2_raw(&g, iterations, 5);
        let (a, b) = (centroid(&p[..8]), centroid(&p[8..]));
        (a[0] - b[0]).hypot(a[1] - b[1])
    };
    assert!(gap(300) > gap(10));
}

#[test]
fn spectral_layout_of_c4_is_a_square() {
    let p = spectral_layout(&Graph::cycle(4)).unwrap().positions;
    let d = |i: usize, j: usize| (p[i][0] - p[j][0]).hypot(p[i][1] - p[j][1]);
    let sides = [d(0, 1), d(1, 2), d(2, 3), d(3, 0)];
    for s in sides {
        assert!((s - sides[0]).abs() < 1e-6, "{sides:?}");
    }
    assert!((d(0, 2) - d(1, 3)).abs() < 1e-6);
    assert!((d(0, 2) - sides[0] * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn spectral_coordinates_are_laplacian_eigenvectors() {
    let mut r = rng(43);
    for _ in 0..20 {
        let g = random_connected(r.gen_range(3..=40), &mut r);
        let raw = spectral_layout_raw(&g).unwrap();
        let l = combinatorial_laplacian(&g);
        for axis in 0..2 {
            let x: Vec<f64> = raw.iter().map(|p| p[axis]).collect();
            assert!(x.iter().sum::<f64>().abs() < 1e-6);
            let lx = l.mul_vec(&x);
            let lambda = lx.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()
                / x.iter().map(|v| v * v).sum::<f64>();
            assert!(lambda > 1e-8);
            for (a, b) in lx.iter().zip(&x) {
                assert!((a - lambda * b).abs() < 1e-6);
            }
        }
    }
    // Leaves of a star coincide on both axes or on one; either is allowed.
    let star = spectral_layout(&Graph::star(5)).unwrap();
    assert!(star.positions.iter().flatten().all(|c| c.is_finite()));
}

#[test]
fn layouts_are_deterministic_and_normalized() {
    let mut r = rng(44);
    let g = random_connected(25, &mut r);
    for algorithm in LayoutAlgorithm::ALL {
        let a = compute_layout(&g, algorithm, 9).unwrap();
        let b = compute_layout(&g, algorithm, 9).unwrap();
        assert_eq!(a, b);
        for c in a.positions.iter().flatten() {
            assert!((0.05 - 1e-9..=0.95 + 1e-9).contains(c));
        }
        let again = normalize(&a.positions);
        for (p, q) in a.positions.iter().zip(&again) {
            assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
        }
    }
}

#[test]
fn node_centers_carry_the_fill_color() {
    let mut r = rng(45);
    let g = random_connected(12, &mut r);
    let layout = compute_layout(&g, LayoutAlgorithm::Circular, 0).unwrap();
    let spec = RenderSpec::default();
    let img = render_image(&g, &layout, &spec).unwrap().image;
    let res = f64::from(spec.resolution);
    for p in &layout.positions {
        let x = (p[0] * res).floor() as u32;
        let y = ((1.0 - p[1]) * res).floor() as u32;
        assert_eq!(img.pixel(x, y), SKYBLUE);
    }
    let again = render_image(&g, &layout, &spec).unwrap().image;
    assert_eq!(img.encode_png().unwrap(), again.encode_png().unwrap());
}
