//! CPLEX-LP export of the mixed-integer model.
//!
//! Naming: vehicles are numbered `1..=m`, the depot is location 0 and
//! customers are `1..=n`. Variables: `x_i_j_v`, `y_c_v`, `del_c_v`, `pi_c_v`,
//! `t_i_v`, `tdep_i_v`, `Tdrop_c`, `Tpick_c`, `q_i_v`, `u_c_v`, `tret_v`, `T`.
//! Every row name starts with its family tag (see [`Family`]).

use std::fmt::Write;

use crate::instance::Instance;

/// Constraint families in model order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Exactly one dropoff and one pickup per customer.
    Service,
    /// One depot departure and one depot return per vehicle.
    Depot,
    /// Clock anchored at the depot.
    DepotTime,
    /// Flow in and out of a customer equals the visit flag.
    Flow,
    NoSelfLoop,
    /// Operations only at visited customers.
    VisitLink,
    DropTiming,
    PickTiming,
    Precedence,
    Departure,
    SameVehicleWait,
    Propagation,
    StartLoad,
    LoadPropagation,
    DropNeedsLoad,
    PickNeedsRoom,
    Mtz,
    Return,
    Makespan,
}

impl Family {
    pub const ALL: [Family; 19] = [
        Family::Service,
        Family::Depot,
        Family::DepotTime,
        Family::Flow,
        Family::NoSelfLoop,
        Family::VisitLink,
        Family::DropTiming,
        Family::PickTiming,
        Family::Precedence,
        Family::Departure,
        Family::SameVehicleWait,
        Family::Propagation,
        Family::StartLoad,
        Family::LoadPropagation,
        Family::DropNeedsLoad,
        Family::PickNeedsRoom,
        Family::Mtz,
        Family::Return,
        Family::Makespan,
    ];

    /// Row name prefix.
    pub fn tag(self) -> &'static str {
        match self {
            Family::Service => "svc",
            Family::Depot => "depot",
            Family::DepotTime => "t0",
            Family::Flow => "flow",
            Family::NoSelfLoop => "noloop",
            Family::VisitLink => "link",
            Family::DropTiming => "tdrop",
            Family::PickTiming => "tpick",
            Family::Precedence => "prec",
            Family::Departure => "dep",
            Family::SameVehicleWait => "wait",
            Family::Propagation => "prop",
            Family::StartLoad => "cap0",
            Family::LoadPropagation => "capflow",
            Family::DropNeedsLoad => "capdrop",
            Family::PickNeedsRoom => "cappick",
            Family::Mtz => "mtz",
            Family::Return => "ret",
            Family::Makespan => "mk",
        }
    }

    /// Number of rows of the family for `n` customers and `m` vehicles.
    pub fn row_count(self, n: usize, m: usize) -> usize {
        let loc = n + 1;
        match self {
            Family::Service => 2 * n,
            Family::Depot => 2 * m,
            Family::DepotTime => 2 * m,
            Family::Flow => 2 * n * m,
            Family::NoSelfLoop => loc * m,
            Family::VisitLink => 2 * n * m,
            Family::DropTiming => 2 * n * m,
            Family::PickTiming => 2 * n * m,
            Family::Precedence => n,
            Family::Departure => n * m,
            Family::SameVehicleWait => n * m,
            Family::Propagation => loc * loc * m,
            Family::StartLoad => m,
            Family::LoadPropagation => 2 * loc * n * m,
            Family::DropNeedsLoad => loc * n * m,
            Family::PickNeedsRoom => loc * n * m,
            Family::Mtz => n * n.saturating_sub(1) * m,
            Family::Return => n * m,
            Family::Makespan => m,
        }
    }
}

/// Valid makespan upper bound: the serial single-vehicle schedule.
pub fn default_big_m(inst: &Instance) -> f64 {
    inst.serial_upper_bound()
}

fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Writes `name: lhs sense rhs` with terms `(coef, var)`.
fn row(out: &mut String, name: &str, terms: &[(f64, String)], sense: &str, rhs: f64) {
    let mut lhs = String::new();
    for (i, (coef, var)) in terms.iter().enumerate() {
        let c = *coef;
        if c == 0.0 {
            continue;
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = c.abs();
        let body = if mag == 1.0 { var.clone() } else { format!("{} {var}", num(mag)) };
        if i == 0 || lhs.is_empty() {
            if c < 0.0 {
                lhs.push_str("- ");
            }
            lhs.push_str(&body);
        } else {
            let _ = write!(lhs, " {sign} {body}");
        }
    }
    if lhs.is_empty() {
        lhs.push_str("0 T");
    }
    let _ = writeln!(out, " {name}: {lhs} {sense} {}", num(rhs));
}

/// Full model in CPLEX LP syntax.
pub fn export_milp(inst: &Instance, big_m: f64) -> String {
    let n = inst.n();
    let m = inst.m();
    let k = inst.k() as f64;
    let bm = big_m;
    let vs = 1..=m;
    let cs = || 1..=n;
    let ns = || 0..=n;
    let x = |i: usize, j: usize, v: usize| format!("x_{i}_{j}_{v}");
    let y = |c: usize, v: usize| format!("y_{c}_{v}");
    let del = |c: usize, v: usize| format!("del_{c}_{v}");
    let pi = |c: usize, v: usize| format!("pi_{c}_{v}");
    let t = |i: usize, v: usize| format!("t_{i}_{v}");
    let tdep = |i: usize, v: usize| format!("tdep_{i}_{v}");
    let q = |i: usize, v: usize| format!("q_{i}_{v}");
    let u = |c: usize, v: usize| format!("u_{c}_{v}");
    let tret = |v: usize| format!("tret_{v}");

    let mut out = String::new();
    let _ = writeln!(out, "\\ VRP-RPD model for instance {}", inst.label);
    let _ = writeln!(out, "\\ n = {n}, m = {m}, k = {}, M = {}", inst.k(), num(bm));
    out.push_str("Minimize\n obj: T\nSubject To\n");

    for c in cs() {
        let terms: Vec<_> = vs.clone().map(|v| (1.0, del(c, v))).collect();
        row(&mut out, &format!("svc_drop_{c}"), &terms, "=", 1.0);
        let terms: Vec<_> = vs.clone().map(|v| (1.0, pi(c, v))).collect();
        row(&mut out, &format!("svc_pick_{c}"), &terms, "=", 1.0);
    }
    for v in vs.clone() {
        let terms: Vec<_> = cs().map(|j| (1.0, x(0, j, v))).collect();
        row(&mut out, &format!("depot_out_{v}"), &terms, "=", 1.0);
        let terms: Vec<_> = cs().map(|i| (1.0, x(i, 0, v))).collect();
        row(&mut out, &format!("depot_in_{v}"), &terms, "=", 1.0);
    }
    for v in vs.clone() {
        row(&mut out, &format!("t0_arr_{v}"), &[(1.0, t(0, v))], "=", 0.0);
        row(&mut out, &format!("t0_dep_{v}"), &[(1.0, tdep(0, v))], "=", 0.0);
    }
    for c in cs() {
        for v in vs.clone() {
            let mut terms: Vec<_> = ns().map(|i| (1.0, x(i, c, v))).collect();
            terms.push((-1.0, y(c, v)));
            row(&mut out, &format!("flow_in_{c}_{v}"), &terms, "=", 0.0);
            let mut terms: Vec<_> = ns().map(|j| (1.0, x(c, j, v))).collect();
            terms.push((-1.0, y(c, v)));
            row(&mut out, &format!("flow_out_{c}_{v}"), &terms, "=", 0.0);
        }
    }
    for i in ns() {
        for v in vs.clone() {
            row(&mut out, &format!("noloop_{i}_{v}"), &[(1.0, x(i, i, v))], "=", 0.0);
        }
    }
    for c in cs() {
        for v in vs.clone() {
            row(&mut out, &format!("link_drop_{c}_{v}"), &[(1.0, del(c, v)), (-1.0, y(c, v))], "<=", 0.0);
            row(&mut out, &format!("link_pick_{c}_{v}"), &[(1.0, pi(c, v)), (-1.0, y(c, v))], "<=", 0.0);
        }
    }
    for c in cs() {
        for v in vs.clone() {
            // t - M(1 - del) <= Tdrop  and  Tdrop <= t + M(1 - del)
            row(
                &mut out,
                &format!("tdrop_lo_{c}_{v}"),
                &[(1.0, t(c, v)), (bm, del(c, v)), (-1.0, format!("Tdrop_{c}"))],
                "<=",
                bm,
            );
            row(
                &mut out,
                &format!("tdrop_hi_{c}_{v}"),
                &[(1.0, format!("Tdrop_{c}")), (-1.0, t(c, v)), (bm, del(c, v))],
                "<=",
                bm,
            );
        }
    }
    for c in cs() {
        for v in vs.clone() {
            row(
                &mut out,
                &format!("tpick_lo_{c}_{v}"),
                &[(1.0, tdep(c, v)), (bm, pi(c, v)), (-1.0, format!("Tpick_{c}"))],
                "<=",
                bm,
            );
            row(
                &mut out,
                &format!("tpick_hi_{c}_{v}"),
                &[(1.0, format!("Tpick_{c}")), (-1.0, tdep(c, v)), (bm, pi(c, v))],
                "<=",
                bm,
            );
        }
    }
    for c in cs() {
        row(
            &mut out,
            &format!("prec_{c}"),
            &[(1.0, format!("Tpick_{c}")), (-1.0, format!("Tdrop_{c}"))],
            ">=",
            inst.p(c),
        );
    }
    for c in cs() {
        for v in vs.clone() {
            row(&mut out, &format!("dep_{c}_{v}"), &[(1.0, tdep(c, v)), (-1.0, t(c, v))], ">=", 0.0);
        }
    }
    for c in cs() {
        for v in vs.clone() {
            // tdep >= t + p (del + pi - 1)
            let p = inst.p(c);
            row(
                &mut out,
                &format!("wait_{c}_{v}"),
                &[(1.0, tdep(c, v)), (-1.0, t(c, v)), (-p, del(c, v)), (-p, pi(c, v))],
                ">=",
                -p,
            );
        }
    }
    for i in ns() {
        for j in ns() {
            for v in vs.clone() {
                // Arrival at the depot is the return time; t_0_v stays the
                // departure anchor.
                let arr = if j == 0 { tret(v) } else { t(j, v) };
                row(
                    &mut out,
                    &format!("prop_{i}_{j}_{v}"),
                    &[(1.0, arr), (-1.0, tdep(i, v)), (-bm, x(i, j, v))],
                    ">=",
                    inst.d(i, j) - bm,
                );
            }
        }
    }
    for v in vs.clone() {
        row(&mut out, &format!("cap0_{v}"), &[(1.0, q(0, v))], "=", k);
    }
    for i in ns() {
        for j in cs() {
            for v in vs.clone() {
                // q_j >= q_i - del_j + pi_j - M(1 - x)
                row(
                    &mut out,
                    &format!("capflow_lo_{i}_{j}_{v}"),
                    &[
                        (1.0, q(j, v)),
                        (-1.0, q(i, v)),
                        (1.0, del(j, v)),
                        (-1.0, pi(j, v)),
                        (-bm, x(i, j, v)),
                    ],
                    ">=",
                    -bm,
                );
                row(
                    &mut out,
                    &format!("capflow_hi_{i}_{j}_{v}"),
                    &[
                        (1.0, q(j, v)),
                        (-1.0, q(i, v)),
                        (1.0, del(j, v)),
                        (-1.0, pi(j, v)),
                        (bm, x(i, j, v)),
                    ],
                    "<=",
                    bm,
                );
            }
        }
    }
    for i in ns() {
        for j in cs() {
            for v in vs.clone() {
                row(
                    &mut out,
                    &format!("capdrop_{i}_{j}_{v}"),
                    &[(1.0, q(i, v)), (-1.0, del(j, v)), (-bm, x(i, j, v))],
                    ">=",
                    -bm,
                );
            }
        }
    }
    for i in ns() {
        for j in cs() {
            for v in vs.clone() {
                row(
                    &mut out,
                    &format!("cappick_{i}_{j}_{v}"),
                    &[(1.0, q(i, v)), (1.0, pi(j, v)), (bm, x(i, j, v))],
                    "<=",
                    k + bm,
                );
            }
        }
    }
    let nc = n as f64;
    for i in cs() {
        for j in cs() {
            if i == j {
                continue;
            }
            for v in vs.clone() {
                row(
                    &mut out,
                    &format!("mtz_{i}_{j}_{v}"),
                    &[(1.0, u(i, v)), (-1.0, u(j, v)), (nc, x(i, j, v))],
                    "<=",
                    nc - 1.0,
                );
            }
        }
    }
    for c in cs() {
        for v in vs.clone() {
            row(
                &mut out,
                &format!("ret_{c}_{v}"),
                &[(1.0, tret(v)), (-1.0, tdep(c, v)), (-bm, x(c, 0, v))],
                ">=",
                inst.d(c, 0) - bm,
            );
        }
    }
    for v in vs.clone() {
        row(&mut out, &format!("mk_{v}"), &[(1.0, "T".to_string()), (-1.0, tret(v))], ">=", 0.0);
    }

    out.push_str("Bounds\n");
    for i in ns() {
        for v in vs.clone() {
            let _ = writeln!(out, " 0 <= {} <= {}", q(i, v), num(k));
        }
    }
    for c in cs() {
        for v in vs.clone() {
            let _ = writeln!(out, " 1 <= {} <= {n}", u(c, v));
        }
    }
    out.push_str("Binaries\n");
    for i in ns() {
        for j in ns() {
            for v in vs.clone() {
                let _ = writeln!(out, " {}", x(i, j, v));
            }
        }
    }
    for c in cs() {
        for v in vs.clone() {
            let _ = writeln!(out, " {} {} {}", y(c, v), del(c, v), pi(c, v));
        }
    }
    out.push_str("Generals\n");
    for c in cs() {
        for v in vs.clone() {
            let _ = writeln!(out, " {}", u(c, v));
        }
    }
    out.push_str("End\n");
    out
}

/// Number of rows in `lp` whose name starts with the family tag.
pub fn count_rows(lp: &str, family: Family) -> usize {
    let prefix = format!("{}_", family.tag());
    let mut in_rows = false;
    let mut count = 0;
    for line in lp.lines() {
        match line.trim() {
            "Subject To" => in_rows = true,
            "Bounds" | "Binaries" | "Generals" | "End" => in_rows = false,
            body if in_rows => {
                if let Some((name, _)) = body.split_once(':') {
                    if name.starts_with(&prefix) {
                        count += 1;
                    }
                }
            }
            _ => {}
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::tests::{single, toy};

    #[test]
    fn objective_and_anchors() {
        let inst = single(1, 1);
        let lp = export_milp(&inst, default_big_m(&inst));
        assert!(lp.contains("Minimize\n obj: T\n"));
        assert!(lp.contains(" prec_1: Tpick_1 - Tdrop_1 >= 20\n"));
        assert!(lp.contains(" cap0_1: q_0_1 = 1\n"));
        assert_eq!(default_big_m(&inst), 2.0 * 10.0 + 20.0 + 10.0);
    }

    #[test]
    fn family_counts_match_closed_forms() {
        for (inst, n, m) in [(single(1, 1), 1, 1), (toy(2, 2), 2, 2)] {
            let lp = export_milp(&inst, default_big_m(&inst));
            let mut total = 0;
            for fam in Family::ALL {
                assert_eq!(count_rows(&lp, fam), fam.row_count(n, m), "{fam:?}");
                total += fam.row_count(n, m);
            }
            let rows = lp
                .lines()
                .skip_while(|l| *l != "Subject To")
                .skip(1)
                .take_while(|l| *l != "Bounds")
                .count();
            assert_eq!(rows, total);
        }
    }

    #[test]
    fn prefixes_do_not_overlap() {
        for a in Family::ALL {
            for b in Family::ALL {
                if a != b {
                    assert!(!format!("{}_", a.tag()).starts_with(&format!("{}_", b.tag())));
                }
            }
        }
    }
}
