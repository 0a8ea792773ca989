//! Local tables of `h_v` at bad places, and their text format:
//!
//! ```text
//! place = 3
//! h[1] = 0
//! h[2] = 1
//! h[3] = unknown
//! place = inf
//! h[-1] = 1
//! ```
//!
//! Labels are the canonical square-class representatives of
//! [`local_labels`]; labels left out are unknown. `h[1]` is always 0.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::characters::{local_labels, ClassLabel};
use crate::error::{Error, Result};
use crate::symbols::Place;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalProfile {
    place: Place,
    table: BTreeMap<ClassLabel, Option<u32>>,
}

impl LocalProfile {
    /// A profile with every nontrivial entry unknown.
    pub fn unknown(place: Place) -> Self {
        let table = local_labels(place)
            .into_iter()
            .map(|l| (l, (l == 1).then_some(0)))
            .collect();
        LocalProfile { place, table }
    }

    /// Fills every label from `h`; the trivial label stays 0.
    pub fn from_fn(place: Place, mut h: impl FnMut(ClassLabel) -> Option<u32>) -> Self {
        let mut p = LocalProfile::unknown(place);
        for (&label, entry) in p.table.iter_mut() {
            if label != 1 {
                *entry = h(label);
            }
        }
        p
    }

    pub fn place(&self) -> Place {
        self.place
    }

    /// `None` for an unknown entry; errors on a label that is not canonical.
    pub fn h(&self, label: ClassLabel) -> Result<Option<u32>> {
        self.table
            .get(&label)
            .copied()
            .ok_or_else(|| Error::invalid(format!("{label} is not a square-class label at {}", self.place)))
    }

    pub fn set(&mut self, label: ClassLabel, value: Option<u32>) -> Result<()> {
        let entry = self
            .table
            .get_mut(&label)
            .ok_or_else(|| Error::invalid(format!("{label} is not a square-class label at {}", self.place)))?;
        if label == 1 && value != Some(0) {
            return Err(Error::invalid("h of the trivial character is 0"));
        }
        *entry = value;
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (ClassLabel, Option<u32>)> + '_ {
        self.table.iter().map(|(&l, &h)| (l, h))
    }

    pub fn is_complete(&self) -> bool {
        self.table.values().all(Option::is_some)
    }

    /// Labels whose entry is unknown.
    pub fn unknown_labels(&self) -> Vec<ClassLabel> {
        self.table.iter().filter(|(_, h)| h.is_none()).map(|(&l, _)| l).collect()
    }
}

/// Profiles keyed by place.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfileSet {
    profiles: BTreeMap<Place, LocalProfile>,
}

impl ProfileSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, profile: LocalProfile) -> Option<LocalProfile> {
        self.profiles.insert(profile.place, profile)
    }

    pub fn get(&self, v: Place) -> Option<&LocalProfile> {
        self.profiles.get(&v)
    }

    pub fn places(&self) -> impl Iterator<Item = Place> + '_ {
        self.profiles.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for p in self.profiles.values() {
            let _ = writeln!(out, "place = {}", p.place);
            for (label, h) in p.entries() {
                match h {
                    Some(h) => {
                        let _ = writeln!(out, "h[{label}] = {h}");
                    }
                    None => {
                        let _ = writeln!(out, "h[{label}] = unknown");
                    }
                }
            }
        }
        out
    }
}

/// Parses a profile file.
pub fn parse_profiles(text: &str) -> Result<ProfileSet> {
    let mut set = ProfileSet::new();
    let mut current: Option<LocalProfile> = None;
    let mut seen: BTreeMap<ClassLabel, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "place" {
            let place: Place = value.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?;
            if set.get(place).is_some() || current.as_ref().is_some_and(|c| c.place == place) {
                return Err(Error::parse(line, format!("duplicate place {place}")));
            }
            if let Some(done) = current.replace(LocalProfile::unknown(place)) {
                set.insert(done);
            }
            seen.clear();
            continue;
        }
        let label = key
            .strip_prefix("h[")
            .and_then(|k| k.strip_suffix(']'))
            .ok_or_else(|| Error::parse(line, format!("unknown key `{key}`")))?;
        let label: ClassLabel = label
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("bad label `{label}`")))?;
        let profile = current
            .as_mut()
            .ok_or_else(|| Error::parse(line, "entry before any `place` line"))?;
        if let Some(prev) = seen.insert(label, line) {
            return Err(Error::parse(line, format!("label {label} already set on line {prev}")));
        }
        let h = if value.eq_ignore_ascii_case("unknown") {
            None
        } else {
            Some(
                value
                    .parse::<u32>()
                    .map_err(|_| Error::parse(line, format!("bad value `{value}`")))?,
            )
        };
        profile.set(label, h).map_err(|e| Error::parse(line, e.to_string()))?;
    }
    if let Some(done) = current {
        set.insert(done);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# bad places of x^3 - 2
place = 2
h[5] = 1
h[-1] = 0
h[2] = unknown
place = 3
h[1] = 0
h[2] = 1
h[3] = 0
h[6] = 1
";

    #[test]
    fn parses_and_round_trips() {
        let set = parse_profiles(SAMPLE).unwrap();
        let p2 = set.get(Place::Finite(2)).unwrap();
        assert_eq!(p2.h(5).unwrap(), Some(1));
        assert_eq!(p2.h(-10).unwrap(), None);
        assert_eq!(p2.h(1).unwrap(), Some(0));
        assert!(p2.h(3).is_err());
        assert!(set.get(Place::Finite(3)).unwrap().is_complete());
        assert_eq!(parse_profiles(&set.to_file_string()).unwrap(), set);
    }

    #[test]
    fn rejects_bad_entries() {
        let cases = [
            ("h[5] = 1", 1),
            ("place = 2\nh[3] = 1", 2),
            ("place = 2\nh[1] = 1", 2),
            ("place = 2\nh[5] = 1\nh[5] = 0", 3),
            ("place = 2\nplace = 2", 2),
            ("place = 4", 1),
            ("place = 3\nh[2] = -1", 2),
            ("place = 3\nfoo = 1", 2),
            ("place = 3\nh[x] = 1", 2),
        ];
        for (text, line) in cases {
            match parse_profiles(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
