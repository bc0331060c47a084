//! A small DPLL solver: unit propagation and chronological backtracking,
//! branching on the lowest unassigned atom with `true` first.

/// Literal `+k` is atom `k - 1`, `-k` its negation.
pub type Lit = i32;

fn value(assign: &[Option<bool>], lit: Lit) -> Option<bool> {
    let v = assign[lit.unsigned_abs() as usize - 1]?;
    Some(if lit > 0 { v } else { !v })
}

/// Assigns forced literals; `false` on conflict.
fn propagate(clauses: &[Vec<Lit>], assign: &mut [Option<bool>]) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        n_open += 1;
                        open = Some(l);
                    }
                }
            }
            if sat {
                continue;
            }
            match (n_open, open) {
                (0, _) => return false,
                (1, Some(l)) => {
                    assign[l.unsigned_abs() as usize - 1] = Some(l > 0);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(clauses: &[Vec<Lit>], mut assign: Vec<Option<bool>>) -> Option<Vec<bool>> {
    if !propagate(clauses, &mut assign) {
        return None;
    }
    let Some(v) = assign.iter().position(Option::is_none) else {
        return Some(assign.into_iter().map(|a| a.expect("complete")).collect());
    };
    for b in [true, false] {
        let mut next = assign.clone();
        next[v] = Some(b);
        if let Some(model) = search(clauses, next) {
            return Some(model);
        }
    }
    None
}

/// A total satisfying assignment for `num_atoms` atoms, if one exists.
pub fn solve(num_atoms: usize, clauses: &[Vec<Lit>]) -> Option<Vec<bool>> {
    search(clauses, vec![None; num_atoms])
}
