use std::collections::BTreeMap;
use std::fmt;

use super::{GameError, Play, Turn, Verdict};
use crate::Player;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameNode {
    Leaf(Verdict),
    Choice { mover: Player, branches: Vec<(Turn, GameNode)> },
}

impl GameNode {
    pub fn leaf(winner: Player) -> Self {
        GameNode::Leaf(Verdict::Win(winner))
    }

    pub fn choice(mover: Player, branches: Vec<(Turn, GameNode)>) -> Self {
        GameNode::Choice { mover, branches }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            GameNode::Leaf(_) => 1,
            GameNode::Choice { branches, .. } => branches.iter().map(|(_, n)| n.leaf_count()).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            GameNode::Leaf(_) => 0,
            GameNode::Choice { branches, .. } => 1 + branches.iter().map(|(_, n)| n.depth()).max().unwrap_or(0),
        }
    }
}

/// Sequence of branch indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodePath(pub Vec<usize>);

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// A finite game below a fixed play prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTree {
    pub root_play: Play,
    pub root: GameNode,
}

impl GameTree {
    /// Checks that every internal node has children and that movers alternate,
    /// starting against the last speaker of `root_play`.
    pub fn new(root_play: Play, root: GameNode) -> Result<Self, GameError> {
        check_node(&root, root_play.last_player(), &mut Vec::new())?;
        Ok(GameTree { root_play, root })
    }

    /// Expands `root_play` to `depth` turns. Nodes where `expand` offers no
    /// turn, or at the depth bound, become leaves judged by `classify`.
    pub fn build(
        root_play: Play,
        depth: usize,
        expand: &dyn Fn(&Play) -> Vec<Turn>,
        classify: &dyn Fn(&Play) -> Verdict,
    ) -> Result<Self, GameError> {
        let root = grow(&root_play, depth, expand, classify)?;
        GameTree::new(root_play, root)
    }

    /// The play reached by following `path`.
    pub fn play_at(&self, path: &NodePath) -> Option<Play> {
        let mut play = self.root_play.clone();
        let mut node = &self.root;
        for &i in &path.0 {
            match node {
                GameNode::Choice { branches, .. } => {
                    let (turn, next) = branches.get(i)?;
                    play = play.extend(turn.clone()).ok()?;
                    node = next;
                }
                GameNode::Leaf(_) => return None,
            }
        }
        Some(play)
    }
}

fn grow(
    play: &Play,
    depth: usize,
    expand: &dyn Fn(&Play) -> Vec<Turn>,
    classify: &dyn Fn(&Play) -> Verdict,
) -> Result<GameNode, GameError> {
    let options = if depth == 0 { Vec::new() } else { expand(play) };
    if options.is_empty() {
        return Ok(GameNode::Leaf(classify(play)));
    }
    let mover = options[0].player();
    let mut branches = Vec::with_capacity(options.len());
    for turn in options {
        let next = play.extend(turn.clone())?;
        branches.push((turn, grow(&next, depth - 1, expand, classify)?));
    }
    Ok(GameNode::Choice { mover, branches })
}

fn check_node(node: &GameNode, last: Option<Player>, path: &mut Vec<usize>) -> Result<(), GameError> {
    let GameNode::Choice { mover, branches } = node else {
        return Ok(());
    };
    let at = NodePath(path.clone());
    if branches.is_empty() {
        return Err(GameError::MalformedTree(format!("internal node {at} has no children")));
    }
    if last == Some(*mover) {
        return Err(GameError::WrongPlayer { last: *mover, got: *mover });
    }
    for (i, (turn, child)) in branches.iter().enumerate() {
        if turn.player() != *mover {
            return Err(GameError::MalformedTree(format!("branch {i} at {at} is not a turn of player {mover}")));
        }
        path.push(i);
        check_node(child, Some(*mover), path)?;
        path.pop();
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub winner: Player,
    /// The winner's choice at each of its decision nodes inside its winning region.
    pub strategy: BTreeMap<NodePath, Turn>,
    choices: BTreeMap<NodePath, usize>,
}

impl Solution {
    /// Plays the strategy against every opponent continuation.
    pub fn wins_every_playout(&self, tree: &GameTree) -> bool {
        self.playout(&tree.root, &mut Vec::new())
    }

    fn playout(&self, node: &GameNode, path: &mut Vec<usize>) -> bool {
        match node {
            GameNode::Leaf(v) => *v == Verdict::Win(self.winner),
            GameNode::Choice { mover, branches } if *mover == self.winner => {
                let Some(&i) = self.choices.get(&NodePath(path.clone())) else {
                    return false;
                };
                path.push(i);
                let ok = self.playout(&branches[i].1, path);
                path.pop();
                ok
            }
            GameNode::Choice { branches, .. } => (0..branches.len()).all(|i| {
                path.push(i);
                let ok = self.playout(&branches[i].1, path);
                path.pop();
                ok
            }),
        }
    }
}

/// Backward induction on a win-lose tree.
pub fn solve_finite(t: &GameTree) -> Result<Solution, GameError> {
    let mut choices = BTreeMap::new();
    let winner = solve_node(&t.root, &mut Vec::new(), &mut choices)?;
    // Keep only the winner's choices.
    let mut strategy = BTreeMap::new();
    let mut kept = BTreeMap::new();
    for (path, (mover, index, turn)) in choices {
        if mover == winner {
            strategy.insert(path.clone(), turn);
            kept.insert(path, index);
        }
    }
    Ok(Solution { winner, strategy, choices: kept })
}

fn solve_node(
    node: &GameNode,
    path: &mut Vec<usize>,
    choices: &mut BTreeMap<NodePath, (Player, usize, Turn)>,
) -> Result<Player, GameError> {
    match node {
        GameNode::Leaf(Verdict::Win(p)) => Ok(*p),
        GameNode::Leaf(_) => Err(GameError::NotWinLose(NodePath(path.clone()).to_string())),
        GameNode::Choice { mover, branches } => {
            let mut winning = None;
            for (i, (_, child)) in branches.iter().enumerate() {
                path.push(i);
                let w = solve_node(child, path, choices)?;
                path.pop();
                if w == *mover && winning.is_none() {
                    winning = Some(i);
                }
            }
            match winning {
                Some(i) => {
                    choices.insert(NodePath(path.clone()), (*mover, i, branches[i].0.clone()));
                    Ok(*mover)
                }
                None => Ok(mover.opponent()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(p: Player, s: &str) -> Turn {
        Turn::of(p, &[s]).unwrap()
    }

    #[test]
    fn depth_one_all_zero() {
        let root = GameNode::choice(
            Player::Zero,
            vec![(t(Player::Zero, "a"), GameNode::leaf(Player::Zero)), (t(Player::Zero, "b"), GameNode::leaf(Player::Zero))],
        );
        let tree = GameTree::new(Play::empty(), root).unwrap();
        let sol = solve_finite(&tree).unwrap();
        assert_eq!(sol.winner, Player::Zero);
        assert!(sol.wins_every_playout(&tree));
        assert_eq!(sol.strategy.len(), 1);
    }

    #[test]
    fn depth_two_forcing_branch() {
        // Player 1 moves first; branch "x" leads to a node where every
        // continuation of player 0 is a win for 1.
        let root = GameNode::choice(
            Player::One,
            vec![
                (
                    t(Player::One, "w"),
                    GameNode::choice(
                        Player::Zero,
                        vec![(t(Player::Zero, "a"), GameNode::leaf(Player::Zero)), (t(Player::Zero, "b"), GameNode::leaf(Player::One))],
                    ),
                ),
                (
                    t(Player::One, "x"),
                    GameNode::choice(
                        Player::Zero,
                        vec![(t(Player::Zero, "a"), GameNode::leaf(Player::One)), (t(Player::Zero, "b"), GameNode::leaf(Player::One))],
                    ),
                ),
            ],
        );
        let tree = GameTree::new(Play::empty(), root).unwrap();
        let sol = solve_finite(&tree).unwrap();
        assert_eq!(sol.winner, Player::One);
        assert_eq!(sol.strategy[&NodePath(vec![])].payloads(), vec!["x"]);
        assert!(sol.wins_every_playout(&tree));
    }

    #[test]
    fn undecided_leaf_is_rejected() {
        let root = GameNode::choice(Player::Zero, vec![(t(Player::Zero, "a"), GameNode::Leaf(Verdict::Undecided))]);
        let tree = GameTree::new(Play::empty(), root).unwrap();
        assert!(matches!(solve_finite(&tree), Err(GameError::NotWinLose(_))));
    }

    #[test]
    fn alternation_enforced() {
        let bad = GameNode::choice(
            Player::Zero,
            vec![(t(Player::Zero, "a"), GameNode::choice(Player::Zero, vec![(t(Player::Zero, "b"), GameNode::leaf(Player::Zero))]))],
        );
        assert!(GameTree::new(Play::empty(), bad).is_err());
        let empty = GameNode::choice(Player::Zero, vec![]);
        assert!(matches!(GameTree::new(Play::empty(), empty), Err(GameError::MalformedTree(_))));
        let prefix = Play::from_turns(vec![t(Player::Zero, "p")]).unwrap();
        let root = GameNode::choice(Player::Zero, vec![(t(Player::Zero, "a"), GameNode::leaf(Player::Zero))]);
        assert!(GameTree::new(prefix, root).is_err());
    }

    #[test]
    fn build_expands_alternating_turns() {
        let expand = |p: &Play| {
            let mover = p.last_player().map(Player::opponent).unwrap_or(Player::Zero);
            vec![t(mover, "a"), t(mover, "b")]
        };
        // Player 0 wins iff the play contains at least two "a" moves.
        let classify = |p: &Play| {
            let a = p.moves().filter(|m| m.payload == "a").count();
            Verdict::Win(if a >= 2 { Player::Zero } else { Player::One })
        };
        let tree = GameTree::build(Play::empty(), 3, &expand, &classify).unwrap();
        assert_eq!(tree.root.leaf_count(), 8);
        assert_eq!(tree.root.depth(), 3);
        let sol = solve_finite(&tree).unwrap();
        assert_eq!(sol.winner, Player::Zero);
        assert!(sol.wins_every_playout(&tree));
        assert_eq!(tree.play_at(&NodePath(vec![0, 1, 0])).unwrap().to_string(), "0:[a] 1:[b] 0:[a]");
    }
}
