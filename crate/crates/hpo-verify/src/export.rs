//! Flat-file exports: decoherence matrices, spectra, time-series, and a
//! structured text form of quadratic operators for golden-file regression.

use hpo_core::fock::{self, FockBasis};
use hpo_core::lattice::TestFunction;
use hpo_core::quadratic::QuadraticOperator;
use hpo_core::C64;

use crate::report::csv_quote;

/// Decoherence matrix as CSV rows (alpha index, beta index, re, im).
pub fn decoherence_csv(labels: &[String], d: &[Vec<C64>]) -> String {
    let mut out = String::from("alpha,beta,re,im\n");
    for (a, row) in d.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.17e},{:.17e}\n",
                csv_quote(&labels[a]),
                csv_quote(&labels[b]),
                v.re,
                v.im
            ));
        }
    }
    out
}

/// Sorted eigenvalue table: one block per row group.
pub fn spectrum_csv(blocks: &[(usize, Vec<f64>)]) -> String {
    let mut out = String::from("block,index,eigenvalue\n");
    for (block, evs) in blocks {
        for (i, ev) in evs.iter().enumerate() {
            out.push_str(&format!("{block},{i},{ev:.17e}\n"));
        }
    }
    out
}

/// Time-series of a lattice function (index, t, re, im).
pub fn function_csv(f: &TestFunction) -> String {
    let mut out = String::from("index,t,re,im\n");
    for (i, v) in f.values().iter().enumerate() {
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e}\n",
            i,
            f.lattice().time(i),
            v.re,
            v.im
        ));
    }
    out
}

/// Structured text form of a quadratic operator: scalar, the two linear
/// coefficient vectors, and the three matrices in coordinate-list form.
/// Zero entries are omitted; the layout is stable for golden files.
pub fn operator_text(op: &QuadraticOperator) -> String {
    let mut out = String::new();
    out.push_str(&format!("modes {}\n", op.modes().size()));
    out.push_str(&format!("scalar {:.17e} {:.17e}\n", op.scalar().re, op.scalar().im));
    let dump_vec = |name: &str, v: &[C64], out: &mut String| {
        for (i, z) in v.iter().enumerate() {
            if z.norm() > 0.0 {
                out.push_str(&format!("{name} {i} {:.17e} {:.17e}\n", z.re, z.im));
            }
        }
    };
    dump_vec("create", op.lin_create(), &mut out);
    dump_vec("annihilate", op.lin_annih(), &mut out);
    let dump_mat = |name: &str, m: &hpo_core::linalg::CMat, out: &mut String| {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                if z.norm() > 0.0 {
                    out.push_str(&format!("{name} {i} {j} {:.17e} {:.17e}\n", z.re, z.im));
                }
            }
        }
    };
    dump_mat("number", op.quad_nc(), &mut out);
    dump_mat("pair-create", op.quad_cc(), &mut out);
    dump_mat("pair-annihilate", op.quad_aa(), &mut out);
    out
}

/// Matrix of a quadratic operator over a truncated occupation basis, as
/// coordinate-list text.
pub fn fock_matrix_text(
    op: &QuadraticOperator,
    basis: &FockBasis,
) -> hpo_core::Result<String> {
    let coo = fock::to_coo(op, basis)?;
    let mut out = format!("dim {}\n", basis.dim());
    for (i, j, v) in coo {
        out.push_str(&format!("{i} {j} {:.17e} {:.17e}\n", v.re, v.im));
    }
    Ok(out)
}
