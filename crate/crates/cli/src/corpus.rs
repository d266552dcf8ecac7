//! Bundled problem files, optionally replaced by a directory named in
//! `KODAIRA_CORPUS_DIR`.

use std::fs;
use std::path::Path;

use crate::schema::{Problem, ProblemFile};
use crate::Failure;

pub const CORPUS_DIR_ENV: &str = "KODAIRA_CORPUS_DIR";

/// The nine realized examples, in the order of the invariant table.
pub const TABLE4_IDS: [&str; 9] = [
    "free-involution-b3",
    "free-auto-genus2-order6",
    "free-auto-genus3-order4",
    "sl23-genus2",
    "double-bisection-genus2",
    "double-bisection-genus3-type1",
    "double-bisection-genus3-type2",
    "d6-symmetry-genus3",
    "four-disjoint-graphs",
];

pub const BUNDLED: &[(&str, &str)] = &[
    ("d6-symmetry-genus3", include_str!("../corpus/d6-symmetry-genus3.json")),
    ("double-bisection-genus2", include_str!("../corpus/double-bisection-genus2.json")),
    ("double-bisection-genus3-type1", include_str!("../corpus/double-bisection-genus3-type1.json")),
    ("double-bisection-genus3-type2", include_str!("../corpus/double-bisection-genus3-type2.json")),
    ("enum-fpf-genus9", include_str!("../corpus/enum-fpf-genus9.json")),
    ("enum-graph-sigma16", include_str!("../corpus/enum-graph-sigma16.json")),
    ("enum-nielsen-genus9-order10", include_str!("../corpus/enum-nielsen-genus9-order10.json")),
    ("enum-sig4", include_str!("../corpus/enum-sig4.json")),
    ("four-disjoint-graphs", include_str!("../corpus/four-disjoint-graphs.json")),
    ("four-disjoint-graphs-recomputed", include_str!("../corpus/four-disjoint-graphs-recomputed.json")),
    ("free-auto-genus2-order6", include_str!("../corpus/free-auto-genus2-order6.json")),
    ("free-auto-genus2-order6-recomputed", include_str!("../corpus/free-auto-genus2-order6-recomputed.json")),
    ("free-auto-genus3-order4", include_str!("../corpus/free-auto-genus3-order4.json")),
    ("free-auto-genus3-order4-recomputed", include_str!("../corpus/free-auto-genus3-order4-recomputed.json")),
    ("free-involution-b3", include_str!("../corpus/free-involution-b3.json")),
    ("gv-d4-genus3", include_str!("../corpus/gv-d4-genus3.json")),
    ("gv-d6-genus5", include_str!("../corpus/gv-d6-genus5.json")),
    ("gv-free-involution-genus3", include_str!("../corpus/gv-free-involution-genus3.json")),
    ("gv-genus2-order6", include_str!("../corpus/gv-genus2-order6.json")),
    ("gv-genus3-order4", include_str!("../corpus/gv-genus3-order4.json")),
    ("gv-q8-genus3", include_str!("../corpus/gv-q8-genus3.json")),
    ("gv-sl23", include_str!("../corpus/gv-sl23.json")),
    ("sl23-genus2", include_str!("../corpus/sl23-genus2.json")),
    ("sl23-genus2-recomputed", include_str!("../corpus/sl23-genus2-recomputed.json")),
    ("vf-graph-b3-order2", include_str!("../corpus/vf-graph-b3-order2.json")),
    ("vf-sl23", include_str!("../corpus/vf-sl23.json")),
];

#[derive(Clone, Debug)]
pub struct Corpus {
    pub entries: Vec<(String, ProblemFile)>,
}

impl Corpus {
    pub fn bundled() -> Result<Corpus, Failure> {
        let entries = BUNDLED
            .iter()
            .map(|(name, text)| Ok((name.to_string(), ProblemFile::parse(text)?)))
            .collect::<Result<Vec<_>, Failure>>()?;
        Ok(Corpus { entries })
    }

    /// All `*.json` files of a directory, sorted by file name.
    pub fn from_dir(dir: &Path) -> Result<Corpus, Failure> {
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| Failure::Io(format!("{}: {}", dir.display(), e)))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut entries = Vec::new();
        for p in paths {
            let text = fs::read_to_string(&p).map_err(|e| Failure::Io(format!("{}: {}", p.display(), e)))?;
            let file = ProblemFile::parse(&text).map_err(|e| e.context(&p.display().to_string()))?;
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            entries.push((name, file));
        }
        Ok(Corpus { entries })
    }

    /// The directory named by the environment, else the bundled files.
    pub fn load() -> Result<Corpus, Failure> {
        match std::env::var_os(CORPUS_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Corpus::from_dir(Path::new(&dir)),
            _ => Corpus::bundled(),
        }
    }

    /// Lookup by corpus id, falling back to the file name.
    pub fn get(&self, id: &str) -> Option<&ProblemFile> {
        self.entries
            .iter()
            .find(|(_, f)| f.id() == Some(id))
            .or_else(|| self.entries.iter().find(|(n, _)| n == id))
            .map(|(_, f)| f)
    }

    pub fn monodromy_problems(&self) -> impl Iterator<Item = &ProblemFile> {
        self.entries.iter().map(|(_, f)| f).filter(|f| matches!(f.problem, Problem::Monodromy(_)))
    }
}

/// A path to a problem file, or the id of a corpus entry.
pub fn resolve(arg: &str) -> Result<ProblemFile, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {}", arg, e)))?;
        return ProblemFile::parse(&text);
    }
    Corpus::load()?
        .get(arg)
        .cloned()
        .ok_or_else(|| Failure::Io(format!("{}: no such file or corpus entry", arg)))
}
