//! Prints the fault catalog and the valid co-fault pairs.

use fade::faults::{enumerate_cofaults, fault_catalog};

fn main() {
    for m in fault_catalog() {
        let params: Vec<String> = m.params.iter().map(|p| format!("{}∈[{}, {}]", p.name, p.lo, p.hi)).collect();
        println!("{:<26} {:<6} {:<10} {}", m.id, m.sensor, m.pre.name(), params.join(" "));
    }
    let co = enumerate_cofaults(fault_catalog());
    println!("\n{} co-fault pairs", co.len());
    for c in &co {
        println!("  {} ({})", c.id(), c.pre.name());
    }
}
