//! Writes a ConceptNet-shaped assertions dump with random concepts.
//!
//! Usage: synthetic_dump <out.csv> [assertions] [concepts] [seed]

use std::fs::File;
use std::io::BufWriter;

use expgraph::kb::dumpgen::{write_dump, DumpSpec};

fn main() -> std::io::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let Some(out) = args.get(1) else {
        eprintln!("usage: synthetic_dump <out.csv> [assertions] [concepts] [seed]");
        std::process::exit(2);
    };
    let num = |i: usize| args.get(i).map(|s| s.parse::<u64>().expect("numeric argument"));
    let mut spec = DumpSpec::default();
    if let Some(n) = num(2) {
        spec.assertions = n as usize;
    }
    if let Some(n) = num(3) {
        spec.concepts = n as usize;
    }
    if let Some(n) = num(4) {
        spec.seed = n;
    }
    let mut w = BufWriter::new(File::create(out)?);
    write_dump(&spec, &mut w)
}
