use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five macro-categories events are aggregated into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Conflict,
    Governance,
    Political,
    Social,
    Economic,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Conflict,
        Category::Governance,
        Category::Political,
        Category::Social,
        Category::Economic,
    ];

    /// Name of the weekly index series this category feeds.
    pub fn index_name(&self) -> &'static str {
        match self {
            Category::Conflict => "JwConflict",
            Category::Governance => "JwGovernance",
            Category::Political => "JwPolitical",
            Category::Social => "JwSocial",
            Category::Economic => "JwEconomy",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Conflict => "Conflict",
            Category::Governance => "Governance",
            Category::Political => "Political",
            Category::Social => "Social",
            Category::Economic => "Economic",
        })
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Conflict" => Ok(Category::Conflict),
            "Governance" => Ok(Category::Governance),
            "Political" => Ok(Category::Political),
            "Social" => Ok(Category::Social),
            "Economic" => Ok(Category::Economic),
            other => Err(Error::InvalidWeightTable(format!(
                "unknown category '{other}'"
            ))),
        }
    }
}

/// Weight of one included event code: sign, category, and a 1-4 strength.
/// The contribution of one event is sign * strength / 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventWeight {
    pub sign: i8,
    pub category: Category,
    pub strength: u8,
}

impl EventWeight {
    pub fn weight(&self) -> f64 {
        f64::from(self.sign) * f64::from(self.strength) / 3.0
    }
}

/// Outcome of looking an event code up in the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lookup {
    Included(EventWeight),
    Excluded,
    Unknown,
}

/// Mapping from event code to inclusion flag, sign, macro-category, and
/// strength. A default table covering 316 event categories ships with the
/// crate; codes can also be loaded from a user file with the
/// header `code,included,sign,category,strength`.
#[derive(Debug, Clone)]
pub struct EventWeightTable {
    entries: BTreeMap<String, Option<EventWeight>>,
}

impl EventWeightTable {
    /// The table shipped with the crate.
    pub fn default_table() -> Self {
        static RAW: &str = include_str!("../../data/event_weights.csv");
        Self::from_reader(RAW.as_bytes()).expect("embedded table is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(file)
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        {
            let headers = csv.headers()?;
            let expect = ["code", "included", "sign", "category", "strength"];
            if headers.iter().collect::<Vec<_>>() != expect {
                return Err(Error::InvalidWeightTable(format!(
                    "expected header code,included,sign,category,strength, got {}",
                    headers.iter().collect::<Vec<_>>().join(",")
                )));
            }
        }
        let mut entries = BTreeMap::new();
        for (i, record) in csv.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let code = record.get(0).unwrap_or("").to_string();
            if code.is_empty() {
                return Err(Error::InvalidWeightTable(format!("line {line}: empty code")));
            }
            let included = match record.get(1).unwrap_or("").to_ascii_lowercase().as_str() {
                "yes" | "true" | "1" => true,
                "no" | "false" | "0" => false,
                other => {
                    return Err(Error::InvalidWeightTable(format!(
                        "line {line}: bad included flag '{other}'"
                    )))
                }
            };
            let weight = if included {
                let sign = match record.get(2).unwrap_or("") {
                    "+" | "+1" | "1" => 1,
                    "-" | "-1" => -1,
                    other => {
                        return Err(Error::InvalidWeightTable(format!(
                            "line {line}: bad sign '{other}'"
                        )))
                    }
                };
                let category: Category = record.get(3).unwrap_or("").parse()?;
                let strength: u8 = record
                    .get(4)
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| Error::InvalidWeightTable(format!("line {line}: bad strength")))?;
                if !(1..=4).contains(&strength) {
                    return Err(Error::InvalidWeightTable(format!(
                        "line {line}: strength {strength} outside 1..=4"
                    )));
                }
                Some(EventWeight {
                    sign,
                    category,
                    strength,
                })
            } else {
                None
            };
            if entries.insert(code.clone(), weight).is_some() {
                return Err(Error::InvalidWeightTable(format!(
                    "line {line}: duplicate code '{code}'"
                )));
            }
        }
        if entries.is_empty() {
            return Err(Error::InvalidWeightTable("no entries".to_string()));
        }
        Ok(EventWeightTable { entries })
    }

    pub fn lookup(&self, code: &str) -> Lookup {
        match self.entries.get(code) {
            Some(Some(w)) => Lookup::Included(*w),
            Some(None) => Lookup::Excluded,
            None => Lookup::Unknown,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn included_count(&self) -> usize {
        self.entries.values().filter(|w| w.is_some()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<&EventWeight>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_ref()))
    }

    /// Writes the table back out in the shipped format.
    pub fn write_to(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "code,included,sign,category,strength")?;
        for (code, entry) in &self.entries {
            match entry {
                Some(e) => writeln!(
                    w,
                    "{code},yes,{},{},{}",
                    if e.sign > 0 { "+" } else { "-" },
                    e.category,
                    e.strength
                )?,
                None => writeln!(w, "{code},no,,,")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_shape() {
        let t = EventWeightTable::default_table();
        assert_eq!(t.len(), 316);
        // The shipped table lists 237 included codes across the five
        // categories.
        assert_eq!(t.included_count(), 237);
        for (_, w) in t.iter() {
            if let Some(w) = w {
                assert!(w.weight().abs() <= 4.0 / 3.0 + 1e-12);
                assert!(w.sign == 1 || w.sign == -1);
                assert!((1..=4).contains(&w.strength));
            }
        }
        let cats: std::collections::BTreeSet<Category> = t
            .iter()
            .filter_map(|(_, w)| w.map(|w| w.category))
            .collect();
        assert_eq!(cats.len(), 5);
    }

    #[test]
    fn known_rows() {
        let t = EventWeightTable::default_table();
        match t.lookup("2042") {
            Lookup::Included(w) => {
                assert_eq!(w.category, Category::Conflict);
                assert_eq!((w.sign, w.strength), (1, 4));
            }
            other => panic!("2042: {other:?}"),
        }
        assert_eq!(t.lookup("110"), Lookup::Excluded);
        match t.lookup("0873") {
            Lookup::Included(w) => assert_eq!((w.sign, w.strength), (-1, 2)),
            other => panic!("0873: {other:?}"),
        }
        assert_eq!(t.lookup("99999"), Lookup::Unknown);
    }

    #[test]
    fn round_trips_through_writer() {
        let t = EventWeightTable::default_table();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let t2 = EventWeightTable::from_reader(buf.as_slice()).unwrap();
        assert_eq!(t.len(), t2.len());
        for (code, w) in t.iter() {
            assert_eq!(t2.lookup(code), t.lookup(code), "{code}");
            let _ = w;
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = "code,included,sign,category,strength\n193,yes,+,Conflict,9\n";
        assert!(EventWeightTable::from_reader(bad.as_bytes()).is_err());
        let dup = "code,included,sign,category,strength\n193,yes,+,Conflict,3\n193,no,,,\n";
        assert!(EventWeightTable::from_reader(dup.as_bytes()).is_err());
        let badcat = "code,included,sign,category,strength\n193,yes,+,Weather,3\n";
        assert!(EventWeightTable::from_reader(badcat.as_bytes()).is_err());
    }
}
