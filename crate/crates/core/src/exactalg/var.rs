use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::{LazyLock, Mutex};

static POOL: LazyLock<Mutex<HashSet<&'static str>>> = LazyLock::new(|| Mutex::new(HashSet::new()));

/// An interned variable name. Variables order by name.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(&'static str);

impl Var {
    pub fn new(name: &str) -> Var {
        let mut pool = POOL.lock().expect("variable pool poisoned");
        if let Some(s) = pool.get(name) {
            return Var(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        pool.insert(leaked);
        Var(leaked)
    }

    pub fn name(self) -> &'static str {
        self.0
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(other.0)
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Var {
        Var::new(s)
    }
}

impl serde::Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0)
    }
}

impl<'de> serde::Deserialize<'de> for Var {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Var, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Var::new(&s))
    }
}
