use cnotopt::gridsynth::{copy_fanout, parity_add_grid, synthesize_grid_depth, Grid, GridLayout};
use cnotopt::{implements_matrix, CnotCircuit, CnotGate, GF2Matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Runs every basis input through the circuit (ancillas start at 0) and
/// checks outputs on the data wires and zeros everywhere else.
fn basis_check(c: &CnotCircuit, m: &GF2Matrix, layout: &GridLayout) {
    let data = layout.data_wires();
    let n = m.n();
    for bits in 0u32..(1 << n) {
        let mut x = vec![false; layout.num_wires()];
        let input: Vec<bool> = (0..n).map(|k| bits >> k & 1 == 1).collect();
        for (k, &w) in data.iter().enumerate() {
            x[w] = input[k];
        }
        let y = c.simulate(&x).unwrap();
        let want = m.mul_vec(&input).unwrap();
        for (w, &b) in y.iter().enumerate() {
            match data.iter().position(|&d| d == w) {
                Some(k) => assert_eq!(b, want[k], "input {bits:b}, output {k}"),
                None => assert!(!b, "ancilla {w} dirty for input {bits:b}"),
            }
        }
    }
}

#[test]
fn four_by_four_exhaustive() {
    let layout = GridLayout::new(4, 4, 4).unwrap();
    let g = layout.graph().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let m = GF2Matrix::random_invertible(4, &mut rng);
        let c = synthesize_grid_depth(&m, &layout).unwrap();
        assert!(g.validate_circuit(&c).unwrap());
        basis_check(&c, &m, &layout);
    }
}

#[test]
fn identity_is_pure_transport() {
    for n in 3..8 {
        let layout = GridLayout::square(n).unwrap();
        let id = GF2Matrix::identity(n);
        let c = synthesize_grid_depth(&id, &layout).unwrap();
        basis_check(&c, &id, &layout);
    }
}

#[test]
fn rejects_bad_inputs() {
    let layout = GridLayout::new(4, 4, 4).unwrap();
    assert!(synthesize_grid_depth(&GF2Matrix::identity(5), &layout).is_err());
    let singular = GF2Matrix::from_rows(&[[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
    assert!(synthesize_grid_depth(&singular, &layout).is_err());
}

#[test]
fn many_layouts_small_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 4..=9 {
        for m1 in 1..=n {
            for m2 in 1..=n * n {
                let Ok(layout) = GridLayout::new(m1, m2, n) else { continue };
                let g = layout.graph().unwrap();
                for _ in 0..3 {
                    let m = GF2Matrix::random_invertible(n, &mut rng);
                    let c = synthesize_grid_depth(&m, &layout).unwrap();
                    assert!(g.validate_circuit(&c).unwrap());
                    assert!(implements_matrix(&c, &m, &layout.data_wires()).unwrap(), "{m1}x{m2} n={n}");
                }
            }
        }
    }
}

#[test]
fn copy_examples() {
    let line = Grid::new(&[1, 3]).unwrap();
    let mut g = Vec::new();
    copy_fanout(&line, &[0, 0], &[vec![0, 1], vec![0, 2]], &mut g).unwrap();
    assert_eq!(g, vec![CnotGate::new(0, 1), CnotGate::new(1, 2)]);
    assert_eq!(CnotCircuit::from_gates(3, g).unwrap().depth(), 2);

    let sq = Grid::new(&[3, 3]).unwrap();
    let region: Vec<Vec<usize>> = (1..9).map(|v| sq.coord(v)).collect();
    let mut g = Vec::new();
    copy_fanout(&sq, &[0, 0], &region, &mut g).unwrap();
    let c = CnotCircuit::from_gates(9, g).unwrap();
    assert!(c.depth() <= 4);
    let mut x = vec![false; 9];
    x[0] = true;
    assert_eq!(c.simulate(&x).unwrap(), vec![true; 9]);
    assert_eq!(c.reversed().simulate(&[true; 9]).unwrap(), x);
}

#[test]
fn copy_into_detached_box() {
    let grid = Grid::new(&[4, 6]).unwrap();
    let region: Vec<Vec<usize>> = (1..3).flat_map(|r| (3..6).map(move |c| vec![r, c])).collect();
    let mut g = Vec::new();
    copy_fanout(&grid, &[3, 0], &region, &mut g).unwrap();
    let c = CnotCircuit::from_gates(24, g).unwrap();
    assert!(grid.graph().unwrap().validate_circuit(&c).unwrap());
    for src_bit in [false, true] {
        let mut x = vec![false; 24];
        x[grid.index(&[3, 0]).unwrap()] = src_bit;
        let y = c.simulate(&x).unwrap();
        for v in 0..24 {
            let inside = region.contains(&grid.coord(v));
            assert_eq!(y[v], x[v] ^ (inside && src_bit));
        }
    }
}

#[test]
fn parity_examples() {
    let line = Grid::new(&[1, 3]).unwrap();
    let mut g = Vec::new();
    parity_add_grid(&line, &[vec![0, 0], vec![0, 1]], &[0, 2], &mut g).unwrap();
    let c = CnotCircuit::from_gates(3, g).unwrap();
    for bits in 0..8u32 {
        let x: Vec<bool> = (0..3).map(|k| bits >> k & 1 == 1).collect();
        let y = c.simulate(&x).unwrap();
        assert_eq!(y, vec![x[0], x[1], x[2] ^ x[0] ^ x[1]]);
    }

    let sq = Grid::new(&[2, 2]).unwrap();
    let mut g = Vec::new();
    parity_add_grid(&sq, &[vec![0, 0], vec![0, 1], vec![1, 0]], &[1, 1], &mut g).unwrap();
    let c = CnotCircuit::from_gates(4, g).unwrap();
    for bits in 0..8u32 {
        let mut x: Vec<bool> = (0..3).map(|k| bits >> k & 1 == 1).collect();
        x.push(false);
        let y = c.simulate(&x).unwrap();
        assert_eq!(y, vec![x[0], x[1], x[2], x[0] ^ x[1] ^ x[2]]);
    }

    let mut g = Vec::new();
    parity_add_grid(&sq, &[], &[1, 1], &mut g).unwrap();
    assert!(CnotCircuit::from_gates(4, g).unwrap().to_matrix().is_identity());
}

#[test]
fn three_dimensional_primitives() {
    let grid = Grid::new(&[3, 3, 3]).unwrap();
    let region: Vec<Vec<usize>> = (0..27).filter(|&v| v != 13).map(|v| grid.coord(v)).collect();
    let mut g = Vec::new();
    copy_fanout(&grid, &[1, 1, 1], &region, &mut g).unwrap();
    let c = CnotCircuit::from_gates(27, g).unwrap();
    assert!(c.depth() <= 6);
    let mut x = vec![false; 27];
    x[13] = true;
    assert!(c.simulate(&x).unwrap().iter().all(|&b| b));

    let s: Vec<Vec<usize>> = [0, 5, 17, 26].iter().map(|&v| grid.coord(v)).collect();
    let mut g = Vec::new();
    parity_add_grid(&grid, &s, &[2, 0, 1], &mut g).unwrap();
    let c = CnotCircuit::from_gates(27, g).unwrap();
    assert!(grid.graph().unwrap().validate_circuit(&c).unwrap());
    let y = grid.index(&[2, 0, 1]).unwrap();
    let mut want = GF2Matrix::identity(27);
    for v in [0, 5, 17, 26] {
        want.set(y, v, true);
    }
    assert_eq!(c.to_matrix(), want);
}
