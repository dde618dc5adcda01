use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{derive_commitments, History, Unit, UnitId};

/// One violated coherence condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateId { id: UnitId },
    DanglingReference { owner: String, id: UnitId },
    EmptyCdu { id: UnitId },
    MembershipCycle { id: UnitId },
    MultipleParents { id: UnitId },
    SelfRelation { relation: String },
    NestedRelation { relation: String },
    /// `scope` is `None` for the top level, otherwise the enclosing CDU.
    Disconnected { scope: Option<UnitId>, components: usize },
    RelationCycle { scope: Option<UnitId> },
    ContradictoryUnit { id: UnitId, atom: String },
    ContradictoryCommitments { atoms: Vec<String> },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::DuplicateId { .. } => "duplicate_id",
            Violation::DanglingReference { .. } => "dangling_reference",
            Violation::EmptyCdu { .. } => "empty_cdu",
            Violation::MembershipCycle { .. } => "membership_cycle",
            Violation::MultipleParents { .. } => "multiple_parents",
            Violation::SelfRelation { .. } => "self_relation",
            Violation::NestedRelation { .. } => "nested_relation",
            Violation::Disconnected { .. } => "disconnected",
            Violation::RelationCycle { .. } => "relation_cycle",
            Violation::ContradictoryUnit { .. } => "contradictory_unit",
            Violation::ContradictoryCommitments { .. } => "contradictory_commitments",
        }
    }
}

fn scope_name(scope: &Option<UnitId>) -> String {
    match scope {
        Some(id) => format!("CDU `{id}`"),
        None => "top level".to_string(),
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.kind())?;
        match self {
            Violation::DuplicateId { id } => write!(f, "unit id `{id}` declared twice"),
            Violation::DanglingReference { owner, id } => write!(f, "{owner} names unknown unit `{id}`"),
            Violation::EmptyCdu { id } => write!(f, "CDU `{id}` has no members"),
            Violation::MembershipCycle { id } => write!(f, "CDU `{id}` transitively contains itself"),
            Violation::MultipleParents { id } => write!(f, "unit `{id}` belongs to more than one CDU"),
            Violation::SelfRelation { relation } => write!(f, "{relation} links a unit to itself"),
            Violation::NestedRelation { relation } => {
                write!(f, "{relation} links a CDU to one of its own members")
            }
            Violation::Disconnected { scope, components } => {
                write!(f, "{} splits into {components} components", scope_name(scope))
            }
            Violation::RelationCycle { scope } => write!(f, "relations form a cycle at {}", scope_name(scope)),
            Violation::ContradictoryUnit { id, atom } => {
                write!(f, "unit `{id}` commits to `{atom}` and its negation")
            }
            Violation::ContradictoryCommitments { atoms } => {
                write!(f, "commitment set contains complementary atoms {}", atoms.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CoherenceReport {
    pub violations: Vec<Violation>,
}

impl CoherenceReport {
    pub fn is_coherent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind() == kind)
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        parts.join("; ")
    }
}

/// Checks every history invariant and reports all violations found.
pub fn validate_history(h: &History) -> CoherenceReport {
    let mut violations = Vec::new();

    let mut index: BTreeMap<&str, &Unit> = BTreeMap::new();
    for unit in &h.units {
        if index.insert(unit.id(), unit).is_some() {
            violations.push(Violation::DuplicateId { id: unit.id().to_string() });
        }
    }

    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
    let mut structural_ok = true;
    for unit in &h.units {
        let Unit::Cdu(cdu) = unit else { continue };
        if cdu.members.is_empty() {
            violations.push(Violation::EmptyCdu { id: cdu.id.clone() });
        }
        for member in &cdu.members {
            if !index.contains_key(member.as_str()) {
                violations.push(Violation::DanglingReference {
                    owner: format!("CDU `{}`", cdu.id),
                    id: member.clone(),
                });
                structural_ok = false;
                continue;
            }
            if parent.insert(member.as_str(), cdu.id.as_str()).is_some() {
                violations.push(Violation::MultipleParents { id: member.clone() });
            }
        }
    }

    // Membership cycles: follow parent links from each unit.
    for unit in &h.units {
        let start = unit.id();
        let mut seen = BTreeSet::new();
        let mut current = start;
        while let Some(&p) = parent.get(current) {
            if p == start {
                violations.push(Violation::MembershipCycle { id: start.to_string() });
                structural_ok = false;
                break;
            }
            if !seen.insert(p) {
                break;
            }
            current = p;
        }
    }

    let ancestors = |id: &str| -> Vec<String> {
        let mut chain = vec![id.to_string()];
        let mut current = id;
        while let Some(&p) = parent.get(current) {
            if chain.iter().any(|c| c == p) {
                break;
            }
            chain.push(p.to_string());
            current = p;
        }
        chain
    };

    let mut edges: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    for rel in &h.relations {
        let mut dangling = false;
        for end in [&rel.source, &rel.target] {
            if !index.contains_key(end.as_str()) {
                violations.push(Violation::DanglingReference {
                    owner: format!("relation {rel}"),
                    id: end.clone(),
                });
                dangling = true;
            }
        }
        if dangling {
            structural_ok = false;
            continue;
        }
        if rel.source == rel.target {
            violations.push(Violation::SelfRelation { relation: rel.to_string() });
            continue;
        }
        let src = ancestors(&rel.source);
        let tgt = ancestors(&rel.target);
        if src.contains(&rel.target) || tgt.contains(&rel.source) {
            violations.push(Violation::NestedRelation { relation: rel.to_string() });
            continue;
        }
        edges.push((src, tgt));
    }

    if structural_ok {
        let mut scopes: Vec<(Option<UnitId>, Vec<String>)> = vec![(
            None,
            h.units
                .iter()
                .filter(|u| !parent.contains_key(u.id()))
                .map(|u| u.id().to_string())
                .collect(),
        )];
        for unit in &h.units {
            if let Unit::Cdu(cdu) = unit {
                scopes.push((Some(cdu.id.clone()), cdu.members.clone()));
            }
        }
        for (scope, members) in scopes {
            check_scope(&scope, &members, &edges, &mut violations);
        }
    }

    for edu in h.edus() {
        for lit in &edu.commitments {
            if !lit.negated && edu.commitments.contains(&lit.complement()) {
                violations.push(Violation::ContradictoryUnit { id: edu.id.clone(), atom: lit.atom.clone() });
            }
        }
    }

    let derived = derive_commitments(h);
    if derived.inconsistent {
        violations.push(Violation::ContradictoryCommitments { atoms: derived.contradictions() });
    }

    CoherenceReport { violations }
}

/// Connectivity and acyclicity of the relation graph projected onto one scope.
fn check_scope(
    scope: &Option<UnitId>,
    members: &[String],
    edges: &[(Vec<String>, Vec<String>)],
    violations: &mut Vec<Violation>,
) {
    if members.is_empty() {
        return;
    }
    let position: BTreeMap<&str, usize> =
        members.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let project = |chain: &[String]| chain.iter().find_map(|c| position.get(c.as_str()).copied());

    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); members.len()];
    let mut undirected = UnionFind::new(members.len());
    for (src, tgt) in edges {
        if let (Some(a), Some(b)) = (project(src), project(tgt)) {
            if a != b {
                adjacency[a].insert(b);
                undirected.union(a, b);
            }
        }
    }

    let components = undirected.count();
    if components > 1 {
        violations.push(Violation::Disconnected { scope: scope.clone(), components });
    }
    if has_cycle(&adjacency) {
        violations.push(Violation::RelationCycle { scope: scope.clone() });
    }
}

fn has_cycle(adjacency: &[BTreeSet<usize>]) -> bool {
    // Kahn's algorithm: a cycle leaves nodes with positive in-degree.
    let mut indegree = vec![0usize; adjacency.len()];
    for targets in adjacency {
        for &t in targets {
            indegree[t] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..adjacency.len()).filter(|&i| indegree[i] == 0).collect();
    let mut removed = 0;
    while let Some(node) = ready.pop() {
        removed += 1;
        for &t in &adjacency[node] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.push(t);
            }
        }
    }
    removed != adjacency.len()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}
