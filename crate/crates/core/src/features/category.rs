use serde::{Deserialize, Serialize};

use super::Channel;
use crate::error::{Error, Result};

/// Dataset profile: which annotation channels the pipeline uses. The
/// `Twitter` profile drops the frame, belief and intensity channels, which
/// short informal posts do not support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    LabWriting,
    Twitter,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::LabWriting => "labwriting",
            Profile::Twitter => "twitter",
        }
    }

    pub fn parse(s: &str) -> Option<Profile> {
        match s {
            "labwriting" => Some(Profile::LabWriting),
            "twitter" => Some(Profile::Twitter),
            _ => None,
        }
    }

    /// Channels available under this profile.
    pub fn channels(self) -> Vec<Channel> {
        match self {
            Profile::LabWriting => Channel::ORDER.to_vec(),
            Profile::Twitter => vec![
                Channel::Pos,
                Channel::Dep,
                Channel::Topic,
                Channel::Cluster,
                Channel::Sent,
            ],
        }
    }

    /// Default topic count for this profile.
    pub fn default_topic_k(self) -> usize {
        match self {
            Profile::LabWriting => 20,
            Profile::Twitter => 40,
        }
    }
}

/// A named set of channels evaluated together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub channels: Vec<Channel>,
}

impl Category {
    fn new(name: &str, channels: &[Channel]) -> Category {
        Category {
            name: name.to_string(),
            channels: channels.to_vec(),
        }
    }
}

fn syntactic() -> Vec<Channel> {
    vec![Channel::Pos, Channel::Dep]
}

fn semantic(profile: Profile) -> Vec<Channel> {
    match profile {
        Profile::LabWriting => vec![Channel::Srl, Channel::Topic, Channel::Cluster],
        Profile::Twitter => vec![Channel::Topic, Channel::Cluster],
    }
}

fn pragmatic(profile: Profile) -> Vec<Channel> {
    match profile {
        Profile::LabWriting => vec![Channel::Lcb, Channel::Sent, Channel::Int],
        Profile::Twitter => vec![Channel::Sent],
    }
}

fn union(a: &[Channel], b: &[Channel]) -> Vec<Channel> {
    Channel::ORDER
        .iter()
        .copied()
        .filter(|c| a.contains(c) || b.contains(c))
        .collect()
}

/// Every category evaluated under a profile: single channels first, then the
/// three linguistic groups, their pairings, and the full set.
pub fn catalog(profile: Profile) -> Vec<Category> {
    let syn = syntactic();
    let sem = semantic(profile);
    let pra = pragmatic(profile);
    let mut rows = Vec::new();
    let singles: [(&str, Channel); 8] = [
        ("pos", Channel::Pos),
        ("parse", Channel::Dep),
        ("srl", Channel::Srl),
        ("topics", Channel::Topic),
        ("clusters", Channel::Cluster),
        ("lcb", Channel::Lcb),
        ("sentiment", Channel::Sent),
        ("intensity", Channel::Int),
    ];
    let available = profile.channels();
    for (name, channel) in singles {
        if available.contains(&channel) {
            rows.push(Category::new(name, &[channel]));
        }
    }
    rows.push(Category::new("syntax", &syn));
    rows.push(Category::new("semantics", &sem));
    rows.push(Category::new("pragmatics", &pra));
    rows.push(Category::new("syntax+semantics", &union(&syn, &sem)));
    rows.push(Category::new("syntax+pragmatics", &union(&syn, &pra)));
    rows.push(Category::new("semantics+pragmatics", &union(&sem, &pra)));
    rows.push(Category::new("all", &available));
    rows
}

/// Resolves comma-separated category names against a profile's catalog.
pub fn resolve_categories(names: &str, profile: Profile) -> Result<Vec<Category>> {
    let rows = catalog(profile);
    let mut out = Vec::new();
    for raw in names.split(',') {
        let name = raw.trim();
        if name.is_empty() {
            continue;
        }
        match rows.iter().find(|c| c.name == name) {
            Some(category) => out.push(category.clone()),
            None => {
                // distinguish "never a category" from "not in this profile"
                let other = match profile {
                    Profile::LabWriting => Profile::Twitter,
                    Profile::Twitter => Profile::LabWriting,
                };
                if catalog(other).iter().any(|c| c.name == name) {
                    return Err(Error::CategoryNotInProfile {
                        category: name.to_string(),
                        profile: profile.as_str().to_string(),
                    });
                }
                return Err(Error::UnknownCategory {
                    name: name.to_string(),
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no categories requested".into()));
    }
    Ok(out)
}
