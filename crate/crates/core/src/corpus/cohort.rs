use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::phones::normalize_label;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Sung,
    Spoken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    /// Matches any speaker; also used when metadata leaves gender blank.
    #[default]
    Any,
}

impl std::str::FromStr for Style {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sung" | "sing" | "singing" => Ok(Style::Sung),
            "spoken" | "speech" | "read" => Ok(Style::Spoken),
            other => Err(Error::InvalidConfig(format!("unknown style `{other}`"))),
        }
    }
}

impl std::str::FromStr for Gender {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Gender::Male),
            "female" | "f" => Ok(Gender::Female),
            "any" | "" => Ok(Gender::Any),
            other => Err(Error::InvalidConfig(format!("unknown gender `{other}`"))),
        }
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Style::Sung => "sung",
            Style::Spoken => "spoken",
        })
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Male => "male",
            Gender::Female => "female",
            Gender::Any => "any",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtteranceMeta {
    pub style: Style,
    pub gender: Gender,
}

/// utterance id -> style and gender.
pub type Metadata = BTreeMap<String, UtteranceMeta>;

/// Which utterances a cohort draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakerCohort {
    pub style: Style,
    #[serde(default)]
    pub gender: Gender,
}

impl SpeakerCohort {
    pub fn matches(&self, meta: &UtteranceMeta) -> bool {
        self.style == meta.style && (self.gender == Gender::Any || self.gender == meta.gender)
    }
}

/// A speaker cohort restricted to a set of phones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub name: String,
    pub speakers: SpeakerCohort,
    pub phones: BTreeSet<String>,
}

impl CohortSpec {
    pub fn new(name: impl Into<String>, speakers: SpeakerCohort, phones: impl IntoIterator<Item = impl AsRef<str>>) -> Result<Self> {
        let name = name.into();
        let phones: BTreeSet<String> = phones.into_iter().map(|p| normalize_label(p.as_ref())).collect();
        if phones.is_empty() {
            return Err(Error::InvalidConfig(format!("cohort `{name}` has no phones")));
        }
        Ok(Self { name, speakers, phones })
    }

    pub fn matches(&self, meta: &UtteranceMeta, label: &str) -> bool {
        self.speakers.matches(meta) && self.phones.contains(&normalize_label(label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching() {
        let female_sung = UtteranceMeta {
            style: Style::Sung,
            gender: Gender::Female,
        };
        let any = SpeakerCohort {
            style: Style::Sung,
            gender: Gender::Any,
        };
        let male = SpeakerCohort {
            style: Style::Sung,
            gender: Gender::Male,
        };
        assert!(any.matches(&female_sung));
        assert!(!male.matches(&female_sung));
        let c = CohortSpec::new("v", any, ["AA1", "iy"]).unwrap();
        assert!(c.matches(&female_sung, "aa"));
        assert!(!c.matches(&female_sung, "s"));
        assert!(CohortSpec::new("none", any, Vec::<String>::new()).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!("Sung".parse::<Style>().unwrap(), Style::Sung);
        assert_eq!("F".parse::<Gender>().unwrap(), Gender::Female);
        assert!("x".parse::<Style>().is_err());
    }
}
