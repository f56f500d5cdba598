//! Plain-text triplet dump of an assembled instance.
//!
//! ```text
//! # mlcp n_z=<n> n_pi=<m>
//! z <index> <label>           one line per nonnegative variable
//! pi <index> <label>          one line per free variable
//! M <row> <col> <value>       nonzeros of M
//! N <row> <col> <value>       nonzeros of N
//! S <row> <col> <value>       nonzeros of S
//! q <row> <value>             nonzero entries of q
//! r <row> <value>             nonzero entries of r
//! ```
//!
//! Indices are zero-based; values use `{:e}` with full precision.

use std::io::{self, Write};

use super::assemble::MlcpInstance;

pub fn write_dump<W: Write>(inst: &MlcpInstance, mut out: W) -> io::Result<()> {
    let l = &inst.layout;
    writeln!(out, "# mlcp n_z={} n_pi={}", l.n_z(), l.n_pi())?;
    for i in 0..l.n_z() {
        writeln!(out, "z {i} {}", l.z_label(i))?;
    }
    for i in 0..l.n_pi() {
        writeln!(out, "pi {i} {}", l.pi_label(i))?;
    }
    for (tag, mat) in [("M", &inst.lcp.m), ("N", &inst.lcp.n), ("S", &inst.lcp.s)] {
        for (r, c, v) in mat.triplets() {
            writeln!(out, "{tag} {r} {c} {v:e}")?;
        }
    }
    for (tag, vec) in [("q", &inst.lcp.q), ("r", &inst.lcp.r)] {
        for (i, v) in vec.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            writeln!(out, "{tag} {i} {v:e}")?;
        }
    }
    Ok(())
}

pub fn dump_string(inst: &MlcpInstance) -> String {
    let mut buf = Vec::new();
    write_dump(inst, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kkt::assemble;
    use crate::model::tests::three_bus;

    #[test]
    fn header_and_counts() {
        let inst = assemble(&three_bus(), None).unwrap();
        let text = dump_string(&inst);
        let (nz, np) = (inst.layout.n_z(), inst.layout.n_pi());
        assert_eq!(text.lines().next().unwrap(), format!("# mlcp n_z={nz} n_pi={np}"));
        assert_eq!(text.lines().filter(|l| l.starts_with("z ")).count(), nz);
        assert_eq!(text.lines().filter(|l| l.starts_with("pi ")).count(), np);
        let m = text.lines().filter(|l| l.starts_with("M ")).count();
        assert_eq!(m, inst.lcp.m.triplets().len());
    }

    #[test]
    fn values_parse_back_exactly() {
        let inst = assemble(&three_bus(), None).unwrap();
        for line in dump_string(&inst).lines().filter(|l| l.starts_with("q ")) {
            let mut it = line.split(' ').skip(1);
            let i: usize = it.next().unwrap().parse().unwrap();
            let v: f64 = it.next().unwrap().parse().unwrap();
            assert_eq!(v, inst.lcp.q[i]);
        }
    }
}
