use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_GROUPS: &str = include_str!("../../data/groups_default.toml");

/// A named basket of member series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfig {
    pub name: String,
    pub members: Vec<String>,
}

impl GroupConfig {
    pub fn validate(&self) -> Result<()> {
        if self.members.len() < 2 {
            return Err(Error::Config(format!(
                "group `{}` needs at least 2 members, got {}",
                self.name,
                self.members.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for m in &self.members {
            if !seen.insert(m) {
                return Err(Error::Config(format!("group `{}` lists `{m}` twice", self.name)));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct GroupFile {
    #[serde(rename = "group", default)]
    groups: Vec<GroupConfig>,
}

/// Parses `[[group]]` tables with `name` and `members` keys.
pub fn parse_groups(text: &str) -> Result<Vec<GroupConfig>> {
    let file: GroupFile = toml::from_str(text).map_err(|e| Error::Config(format!("group config: {e}")))?;
    if file.groups.is_empty() {
        return Err(Error::Config("group config defines no groups".into()));
    }
    let mut names = std::collections::HashSet::new();
    for g in &file.groups {
        if !names.insert(&g.name) {
            return Err(Error::Config(format!("duplicate group name `{}`", g.name)));
        }
    }
    Ok(file.groups)
}

pub fn load_groups(path: impl AsRef<Path>) -> Result<Vec<GroupConfig>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_groups(&text)
}

/// Regional and producer/importer/exporter baskets over 44 economies.
pub fn default_groups() -> Vec<GroupConfig> {
    parse_groups(DEFAULT_GROUPS).expect("bundled group config parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config() {
        let groups = default_groups();
        assert_eq!(groups.len(), 18);
        assert_eq!(groups[0].name, "GPR_NA");
        assert_eq!(groups[0].members, vec!["GPR_CAN", "GPR_MEX", "GPR_USA"]);
        assert!(groups.iter().all(|g| g.validate().is_ok()));
        let mut all: Vec<&String> = groups.iter().flat_map(|g| &g.members).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 44);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(parse_groups("").is_err());
        let one = "[[group]]\nname = \"solo\"\nmembers = [\"A\"]\n";
        assert!(parse_groups(one).unwrap()[0].validate().is_err());
        let dup =
            "[[group]]\nname = \"a\"\nmembers = [\"A\", \"B\"]\n[[group]]\nname = \"a\"\nmembers = [\"A\", \"B\"]\n";
        assert!(parse_groups(dup).is_err());
    }
}
