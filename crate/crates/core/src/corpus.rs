//! Small Boolean functions with hand-computed `Δ`, embedded for tests,
//! benchmarks and the acceptance suite.

use crate::boolcirc::{parse_boolfunc, BoolFunc};

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub text: &'static str,
    pub delta: i64,
}

impl Entry {
    pub fn func(&self) -> BoolFunc {
        parse_boolfunc(self.text).unwrap_or_else(|e| panic!("corpus entry {}: {e}", self.name))
    }
}

macro_rules! entry {
    ($name:literal, $delta:expr) => {
        Entry {
            name: $name,
            text: include_str!(concat!("../corpus/", $name, ".bf")),
            delta: $delta,
        }
    };
}

pub const ENTRIES: &[Entry] = &[
    entry!("const1", 2),
    entry!("z1", 0),
    entry!("not1", 0),
    entry!("const2", 4),
    entry!("cz", 2),
    entry!("z1z2", 0),
    entry!("cz_z1", 2),
    entry!("and2", 2),
    entry!("or2", -2),
    entry!("table_xnor", 0),
    entry!("cz12_n3", 4),
    entry!("path3", 4),
    entry!("majority3", 0),
    entry!("z1_cz23", 0),
    entry!("ccz", 6),
    entry!("ccz_z1", 2),
    entry!("table_and3", 6),
    entry!("xor_and3", 4),
];

pub fn get(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}
