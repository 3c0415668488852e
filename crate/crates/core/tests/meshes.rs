use slipflow::mesh::{mesh_annulus, mesh_disk_with_holes, mesh_mirror_symmetric, read_mesh_files, write_mesh_files, import_mesh};
use slipflow::{Curve, DomainSpec};

fn two_holes() -> DomainSpec {
    DomainSpec::from_curves(vec![
        Curve::circle([0.0, 0.0], 3.0).unwrap(),
        Curve::circle([-1.2, 0.0], 0.5).unwrap(),
        Curve::circle([1.3, 0.0], 0.6).unwrap(),
    ])
    .unwrap()
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = mesh_disk_with_holes(&two_holes(), 0.3).unwrap();
    let [node, ele, bnd] = write_mesh_files(&m, &dir.path().join("m"), Some("test")).unwrap();
    let files = read_mesh_files(&node, &ele, Some(&bnd)).unwrap();
    assert!(files.node.contains("# test"));
    let back = import_mesh(&node, &ele, two_holes()).unwrap();
    back.check_invariants().unwrap();
    assert_eq!(back.n_vertices(), m.n_vertices());
    assert_eq!(back.triangles(), m.triangles());
    assert!((back.area() - m.area()).abs() < 1e-12);
    assert_eq!(back.boundary_edges().len(), m.boundary_edges().len());
}

#[test]
fn curved_area_is_exact_to_quadrature() {
    let exact = std::f64::consts::PI * (9.0 - 0.25 - 0.36);
    let coarse = mesh_disk_with_holes(&two_holes(), 0.35).unwrap();
    let fine = mesh_mirror_symmetric(&two_holes(), 0.3).unwrap();
    for m in [&coarse, &fine] {
        m.check_invariants().unwrap();
        assert!((m.area() - exact).abs() < 1e-3 * exact, "area {}", m.area());
        assert!((m.polygonal_area() - exact).abs() > 10.0 * (m.area() - exact).abs());
    }
}

#[test]
fn structured_annulus_counts() {
    let m = mesh_annulus(1.0, 2.0, 4, 16).unwrap();
    assert_eq!(m.n_vertices(), 5 * 16);
    assert_eq!(m.n_triangles(), 2 * 4 * 16);
    // P2 nodes: vertices plus edges
    assert_eq!(m.n_nodes(), m.n_vertices() + m.edges().len());
}

#[test]
fn isoparametric_area_is_fourth_order() {
    let area = 3.0 * std::f64::consts::PI;
    let e: Vec<f64> = [16, 32, 64].iter().map(|&n| (mesh_annulus(1.0, 2.0, 4, n).unwrap().area() - area).abs()).collect();
    assert!(e[0] / e[1] > 14.0 && e[1] / e[2] > 14.0, "{e:?}");
}
