use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::{Error, Result};

const BUILTIN: &str = include_str!("../../data/phone_classes.json");

/// Named sets of phone symbols, e.g. `vowels` or `voiced_fricatives`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneClasses {
    classes: BTreeMap<String, BTreeSet<String>>,
}

/// Lower-cases a label and drops ARPAbet stress digits (`AH1` -> `ah`).
pub fn normalize_label(label: &str) -> String {
    label.trim().trim_end_matches(|c: char| c.is_ascii_digit()).to_ascii_lowercase()
}

impl PhoneClasses {
    /// The ARPAbet table shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("shipped phone table parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("phone class table: {e}")))?;
        let mut classes = BTreeMap::new();
        for (name, symbols) in raw {
            let set: BTreeSet<String> = symbols.iter().map(|s| normalize_label(s)).collect();
            if set.is_empty() || set.contains("") {
                return Err(Error::InvalidConfig(format!("phone class `{name}` is empty or has a blank symbol")));
            }
            classes.insert(name, set);
        }
        Ok(Self { classes })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn class(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.classes.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    pub fn is_known(&self, label: &str) -> bool {
        let l = normalize_label(label);
        self.classes.values().any(|s| s.contains(&l))
    }

    /// Labels that belong to no class, sorted.
    pub fn unknown<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        let set: BTreeSet<String> = labels.into_iter().filter(|l| !self.is_known(l)).map(str::to_string).collect();
        set.into_iter().collect()
    }
}
