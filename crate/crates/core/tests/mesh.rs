//! Meshing contract tests: conformity, constraint resolution, region tags,
//! boundary trace matrices.

use eitlab::geom::{point, LayeredBackground, Point, Polygon};
use eitlab::mesh::{boundary_trace_space, triangulate, Domain, EdgeKind, MeshOptions};

fn bg_two_layer() -> LayeredBackground {
    LayeredBackground::new(1.0, vec![-1.0, 0.0, 1.0], vec![1.0, 3.0]).unwrap()
}

#[test]
fn area_partition_single_layer() {
    let bg = LayeredBackground::homogeneous(1.0);
    let mesh = triangulate(&Domain::square(bg), None, &MeshOptions::new(0.5)).unwrap();
    mesh.validate().unwrap();
    assert!((mesh.total_area() - 4.0).abs() < 1e-12, "area {}", mesh.total_area());
}

#[test]
fn area_partition_refined_with_inclusion() {
    let bg = bg_two_layer();
    let p = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
    let mesh = triangulate(&Domain::square(bg), Some(&p), &MeshOptions::new(0.1)).unwrap();
    mesh.validate().unwrap();
    assert!((mesh.total_area() - 4.0).abs() < 1e-11);
    assert!(mesh.max_edge_len() <= 0.1 * 1.2 + 1e-12);
    assert!(mesh.min_angle_deg() >= 19.5, "min angle {}", mesh.min_angle_deg());
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    eitlab::geom::dist_point_segment(p, a, b) < 1e-12
}

#[test]
fn constraints_resolved_as_edge_unions() {
    let bg = bg_two_layer();
    let p = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
    let mesh = triangulate(&Domain::square(bg.clone()), Some(&p), &MeshOptions::new(0.15)).unwrap();

    // Collect mesh edges lying on each constraint carrier and check they
    // chain across the carrier without gaps.
    let sides: Vec<(Point, Point)> = p.sides().collect();
    for (a, b) in sides {
        let mut covered = 0.0;
        for (i, j, _) in &mesh.constraint_edges {
            let (u, v) = (mesh.nodes[*i], mesh.nodes[*j]);
            if on_segment(u, a, b) && on_segment(v, a, b) {
                covered += u.dist(v);
            }
        }
        assert!(
            (covered - a.dist(b)).abs() < 1e-10,
            "side ({},{})-({},{}) covered {covered} of {}",
            a.x,
            a.y,
            b.x,
            b.y,
            a.dist(b)
        );
    }
    // Interface y = 0 spans the whole width.
    let mut covered = 0.0;
    for (i, j, kind) in &mesh.constraint_edges {
        if *kind != EdgeKind::Interface {
            continue;
        }
        let (u, v) = (mesh.nodes[*i], mesh.nodes[*j]);
        assert!(u.y.abs() < 1e-12 && v.y.abs() < 1e-12);
        covered += u.dist(v);
    }
    assert!((covered - 2.0).abs() < 1e-10, "interface covered {covered}");
}

#[test]
fn region_tags_agree_with_ray_casting_oracle() {
    let bg = bg_two_layer();
    // An irregular hexagon straddling the interface.
    let p = Polygon::new(vec![
        point(-0.45, -0.32),
        point(0.1, -0.4),
        point(0.5, -0.12),
        point(0.42, 0.3),
        point(-0.05, 0.45),
        point(-0.5, 0.2),
    ])
    .unwrap();
    let mesh = triangulate(&Domain::square(bg.clone()), Some(&p), &MeshOptions::new(0.09)).unwrap();
    for t in 0..mesh.n_triangles() {
        let c = mesh.centroid(t);
        let tag = mesh.region[t];
        assert_eq!(tag.inside, p.contains(c), "triangle {t} at ({}, {})", c.x, c.y);
        assert_eq!(tag.layer, bg.layer_of(c.y));
    }
}

#[test]
fn euler_relation_holds() {
    let bg = bg_two_layer();
    let p = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
    let mesh = triangulate(&Domain::square(bg), Some(&p), &MeshOptions::new(0.2)).unwrap();
    let v = mesh.n_nodes() as i64;
    let f = mesh.n_triangles() as i64;
    let e = mesh.edge_map().len() as i64;
    assert_eq!(v - e + f, 1, "V={v} E={e} F={f}");
}

#[test]
fn refinement_preserves_conformity() {
    let bg = bg_two_layer();
    let p = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
    for h in [0.2, 0.1] {
        let mesh = triangulate(&Domain::square(bg.clone()), Some(&p), &MeshOptions::new(h)).unwrap();
        mesh.validate().unwrap();
        assert!(mesh.max_edge_len() <= h * 1.2 + 1e-12);
    }
}

#[test]
fn chimney_domain_meshes() {
    let bg = bg_two_layer();
    let d0 = 0.25;
    let domain = Domain::with_chimney(bg, d0);
    let mesh = triangulate(&domain, None, &MeshOptions::new(0.12)).unwrap();
    mesh.validate().unwrap();
    let expect = 4.0 + 2.0 * d0 * 2.0 * d0;
    assert!((mesh.total_area() - expect).abs() < 1e-11);
    // Chimney triangles keep the top layer.
    for t in 0..mesh.n_triangles() {
        if mesh.centroid(t).y > 1.0 {
            assert_eq!(mesh.region[t].layer, 1);
        }
    }
}

#[test]
fn boundary_nodes_form_the_outline_cycle() {
    let bg = LayeredBackground::homogeneous(1.0);
    let h = 0.25;
    let mesh = triangulate(&Domain::square(bg), None, &MeshOptions::new(h)).unwrap();
    let nb = mesh.boundary_nodes.len();
    assert_eq!(nb, 32, "uniform boundary subdivision: 8 per side");
    for w in 0..nb {
        let a = mesh.nodes[mesh.boundary_nodes[w]];
        let b = mesh.nodes[mesh.boundary_nodes[(w + 1) % nb]];
        assert!((a.dist(b) - h).abs() < 1e-12);
        assert!(a.x.abs() == 1.0 || a.y.abs() == 1.0);
    }
}

#[test]
fn trace_matrices_match_textbook_pattern() {
    let bg = LayeredBackground::homogeneous(1.0);
    let h = 0.25;
    let mesh = triangulate(&Domain::square(bg), None, &MeshOptions::new(h)).unwrap();
    let tr = boundary_trace_space(&mesh);
    let n = tr.n();
    // Uniform subdivision: mass diag 2l/3, off l/6; row sums l.
    for i in 0..n {
        assert!((tr.mass[(i, i)] - 2.0 * h / 3.0).abs() < 1e-12);
        let row: f64 = (0..n).map(|j| tr.mass[(i, j)]).sum();
        assert!((row - h).abs() < 1e-12);
    }
    assert!((tr.perimeter() - 8.0).abs() < 1e-12);
    // Stiffness kernel contains constants.
    let ones = nalgebra::DVector::from_element(n, 1.0);
    let r = &tr.stiffness * &ones;
    assert!(r.amax() < 1e-12);
}

#[test]
fn trace_eigenvalues_match_fourier_oracle() {
    let bg = LayeredBackground::homogeneous(1.0);
    let mesh = triangulate(&Domain::square(bg), None, &MeshOptions::new(0.05)).unwrap();
    let tr = boundary_trace_space(&mesh);
    let n = tr.n();
    // Generalized eigenvalues of (K, M) approximate (2 pi k / |dOmega|)^2.
    let chol = nalgebra::Cholesky::new(tr.mass.clone()).unwrap();
    let li = chol.l().try_inverse().unwrap();
    let a = &li * &tr.stiffness * li.transpose();
    let sym = (&a + a.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    let perimeter = 8.0;
    assert!(eig[0].abs() < 1e-10, "zero mode, got {}", eig[0]);
    for k in 1..=4usize {
        // Modes come in cos/sin pairs.
        let expect = (2.0 * std::f64::consts::PI * k as f64 / perimeter).powi(2);
        for idx in [2 * k - 1, 2 * k] {
            let rel = (eig[idx] - expect).abs() / expect;
            assert!(rel < 0.02, "mode {k}: {} vs {expect} (rel {rel})", eig[idx]);
        }
    }
}

#[test]
fn mesh_is_bit_reproducible() {
    let bg = bg_two_layer();
    let p = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
    let m1 = triangulate(&Domain::square(bg.clone()), Some(&p), &MeshOptions::new(0.11)).unwrap();
    let m2 = triangulate(&Domain::square(bg), Some(&p), &MeshOptions::new(0.11)).unwrap();
    assert_eq!(m1.export_text(), m2.export_text());
}

#[test]
fn text_export_round_trips_header() {
    let bg = LayeredBackground::homogeneous(1.0);
    let mesh = triangulate(&Domain::square(bg), None, &MeshOptions::new(0.5)).unwrap();
    let txt = mesh.export_text();
    let first = txt.lines().next().unwrap();
    assert_eq!(
        first,
        format!("nodes {} triangles {}", mesh.n_nodes(), mesh.n_triangles())
    );
    assert_eq!(txt.lines().count(), 1 + mesh.n_nodes() + mesh.n_triangles());
}
