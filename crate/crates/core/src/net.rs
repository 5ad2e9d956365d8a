//! Text net diagram: the cube unfolded into a cross, one 3×3 block per face,
//! printing each slot's occupant id with an orientation mark. A debugging
//! aid for solve traces, not a UI.
//!
//! Edge cells show the occupying edge id plus `!` when flipped; corner cells
//! show the corner id plus `+`/`-` for twists. Centers show the face letter.

use crate::cube::{
    CornerOrientation, CubeState, EdgeOrientation, SlotId, CORNER_SLOT_COORD, EDGE_SLOT_COORD,
};

/// Physical coordinates (each component in {-1, 0, 1}) of an edge slot.
fn edge_phys(slot_idx: usize) -> [i8; 3] {
    let c = EDGE_SLOT_COORD[slot_idx];
    [c[0], c[1] + 1, c[2] - 1]
}

/// Physical coordinates of a corner slot.
fn corner_phys(slot_idx: usize) -> [i8; 3] {
    let c = CORNER_SLOT_COORD[slot_idx];
    [2 * c[0] - 1, 2 * c[1] + 1, 2 * c[2] - 1]
}

#[allow(clippy::needless_range_loop)]
fn cell_at(state: &CubeState, phys: [i8; 3]) -> String {
    for (i, _) in EDGE_SLOT_COORD.iter().enumerate() {
        if edge_phys(i) == phys {
            let slot = SlotId::new((i + 1) as u8).unwrap();
            let cubie = state.occupant(slot);
            let mark = match state.edge_spin(cubie) {
                EdgeOrientation::Oriented => ' ',
                EdgeOrientation::Flipped => '!',
            };
            return format!("{:>2}{}", cubie.get(), mark);
        }
    }
    for (i, _) in CORNER_SLOT_COORD.iter().enumerate() {
        if corner_phys(i) == phys {
            let slot = SlotId::new((i + 13) as u8).unwrap();
            let cubie = state.occupant(slot);
            let mark = match state.corner_spin(cubie) {
                CornerOrientation::Zero => ' ',
                CornerOrientation::Plus => '+',
                CornerOrientation::Minus => '-',
            };
            return format!("{:>2}{}", cubie.get(), mark);
        }
    }
    unreachable!("no slot at {phys:?}")
}

/// One face as a 3×3 of cell strings. `rows` and `cols` enumerate the two
/// in-face physical axes; `fixed` pins the face's normal coordinate.
fn face_grid(
    state: &CubeState,
    letter: char,
    fixed: (usize, i8),
    rows: (usize, [i8; 3]),
    cols: (usize, [i8; 3]),
) -> [[String; 3]; 3] {
    let mut grid: [[String; 3]; 3] = Default::default();
    for (r, rv) in rows.1.iter().enumerate() {
        for (c, cv) in cols.1.iter().enumerate() {
            let mut phys = [0i8; 3];
            phys[fixed.0] = fixed.1;
            phys[rows.0] = *rv;
            phys[cols.0] = *cv;
            grid[r][c] = if *rv == 0 && *cv == 0 {
                format!(" {letter} ")
            } else {
                cell_at(state, phys)
            };
        }
    }
    grid
}

/// Renders the unfolded cube:
///
/// ```text
///          U
///        L F R B
///          D
/// ```
pub fn net_diagram(state: &CubeState) -> String {
    // Axes: x is the L(+1)/R(-1) normal, y the F(+1)/B(-1) normal, z the
    // U(+1)/D(-1) normal.
    let u = face_grid(state, 'U', (2, 1), (1, [-1, 0, 1]), (0, [1, 0, -1]));
    let d = face_grid(state, 'D', (2, -1), (1, [1, 0, -1]), (0, [1, 0, -1]));
    let f = face_grid(state, 'F', (1, 1), (2, [1, 0, -1]), (0, [1, 0, -1]));
    let b = face_grid(state, 'B', (1, -1), (2, [1, 0, -1]), (0, [-1, 0, 1]));
    let l = face_grid(state, 'L', (0, 1), (2, [1, 0, -1]), (1, [-1, 0, 1]));
    let r = face_grid(state, 'R', (0, -1), (2, [1, 0, -1]), (1, [1, 0, -1]));

    let mut out = String::new();
    let pad = " ".repeat(12);
    for row in &u {
        out.push_str(&pad);
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    for i in 0..3 {
        let line = [&l[i], &f[i], &r[i], &b[i]]
            .iter()
            .map(|face| face.join(" "))
            .collect::<Vec<_>>()
            .join("  ");
        out.push_str(&line);
        out.push('\n');
    }
    for row in &d {
        out.push_str(&pad);
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::solved;
    use crate::notation::parse_sequence;

    #[test]
    fn diagram_shows_every_cubie_once() {
        let text = net_diagram(&solved());
        for id in 1..=20 {
            let needle = format!("{id:>2}");
            assert!(text.contains(&needle), "missing cubie {id}:\n{text}");
        }
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn diagram_marks_flips_and_twists() {
        let s = parse_sequence("F").unwrap().apply(&solved());
        let text = net_diagram(&s);
        assert!(text.contains('!'), "flipped edges should be marked:\n{text}");
        assert!(
            text.contains('+') && text.contains('-'),
            "twisted corners should be marked:\n{text}"
        );
    }

    #[test]
    fn diagram_is_a_pure_function_of_state() {
        let s = parse_sequence("R U R' U'").unwrap().apply(&solved());
        assert_eq!(net_diagram(&s), net_diagram(&s));
        assert_ne!(net_diagram(&s), net_diagram(&solved()));
    }

    #[test]
    fn every_physical_cell_is_covered() {
        // All 20 non-center stickersable positions resolve to a slot.
        let mut count = 0;
        for x in [-1i8, 0, 1] {
            for y in [-1i8, 0, 1] {
                for z in [-1i8, 0, 1] {
                    let nonzero = [x, y, z].iter().filter(|v| **v != 0).count();
                    if nonzero >= 2 {
                        cell_at(&solved(), [x, y, z]);
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 20);
    }
}
