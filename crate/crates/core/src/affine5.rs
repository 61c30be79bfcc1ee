//! Optimum XAGs for the 48 affine equivalence classes of 5-variable
//! functions, embedded from `data/affine5.txt`.

use crate::boolfunc::TruthTable;
use crate::error::{Error, Result};
use crate::network::Xag;

const TABLE: &str = include_str!("../data/affine5.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTableEntry {
    pub class: usize,
    pub function: TruthTable,
    pub mc: usize,
    /// Netlist as listed; its inputs are the variables below the first gate.
    pub netlist: String,
}

impl ClassTableEntry {
    /// Number of inputs the listed netlist is written over.
    pub fn netlist_inputs(&self) -> usize {
        self.netlist
            .lines()
            .find_map(|l| {
                let (lhs, _) = l.split_once('=')?;
                let idx: usize = lhs.trim().strip_prefix('x')?.parse().ok()?;
                Some(idx - 1)
            })
            .unwrap_or(self.function.num_vars())
    }

    pub fn xag(&self) -> Result<Xag> {
        Xag::parse(&self.netlist, Some(self.netlist_inputs()))
    }

    /// The listed netlist simulated over the table's 5 variables.
    pub fn simulate(&self) -> Result<TruthTable> {
        self.xag()?.simulate().extend(self.function.num_vars())
    }
}

pub fn parse_table(text: &str) -> Result<Vec<ClassTableEntry>> {
    let mut entries: Vec<ClassTableEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        if let Some(rest) = line.strip_prefix("class ") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let [class, hex, mc] = fields[..] else {
                return Err(err("expected `class <id> <hex> <mc>`"));
            };
            let vars = TruthTable::vars_for_digits(hex.len()).ok_or_else(|| err("bad hex length"))?;
            entries.push(ClassTableEntry {
                class: class.parse().map_err(|_| err("bad class id"))?,
                function: TruthTable::from_hex(hex, vars)?,
                mc: mc.parse().map_err(|_| err("bad MC"))?,
                netlist: String::new(),
            });
        } else {
            let entry = entries.last_mut().ok_or_else(|| err("netlist line before any class"))?;
            entry.netlist.push_str(line);
            entry.netlist.push('\n');
        }
    }
    Ok(entries)
}

/// All 48 entries in class order.
pub fn table() -> Vec<ClassTableEntry> {
    parse_table(TABLE).expect("embedded table is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_shape() {
        let t = table();
        assert_eq!(t.len(), 48);
        assert!(t.iter().enumerate().all(|(i, e)| e.class == i));
        assert_eq!(t.iter().map(|e| e.mc).sum::<usize>(), 162);
        assert_eq!(t[17].netlist_inputs(), 2);
        assert_eq!(t[2].netlist_inputs(), 4);
        assert_eq!(t[0].netlist_inputs(), 5);
    }

    #[test]
    fn spot_entries_simulate() {
        let t = table();
        assert_eq!(t[9].simulate().unwrap().to_hex(), "f7788000");
        assert_eq!(t[0].simulate().unwrap().to_hex(), "00000000");
        assert_eq!(t[44].xag().unwrap().and_count(), 2);
    }

    #[test]
    fn malformed_tables() {
        assert!(parse_table("x5 = x1 & x2\n").is_err());
        assert!(parse_table("class 1 8\n").is_err());
        assert!(parse_table("class a 80000000 4\n").is_err());
        assert_eq!(parse_table("# only a comment\n").unwrap(), vec![]);
    }
}
