//! Scenario documents: a map plus the operator's scripted intent.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::grid::GoalId;
use super::map::{load_map, World};
use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntentSwitch {
    /// Seconds since trial start.
    pub time: f64,
    pub goal: GoalId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirmClickEvent {
    pub time: f64,
    pub goal: GoalId,
}

/// Two distinct goals drawn from the trial seed; the operator heads to the
/// first and switches to the second at `switch_time`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPair {
    pub switch_time: f64,
    #[serde(default)]
    pub airm_clicks: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub world: World,
    pub intent_script: Vec<IntentSwitch>,
    pub airm_script: Vec<AirmClickEvent>,
    pub random_pair: Option<RandomPair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    id: String,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    map: Option<String>,
    #[serde(default)]
    map_text: Option<String>,
    #[serde(default)]
    intent: Vec<ScriptEntry>,
    #[serde(default)]
    airm: Vec<ScriptEntry>,
    #[serde(default)]
    random_pair: Option<RandomPair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptEntry {
    time: f64,
    goal: String,
}

const BUILTIN: [(&str, &str, &str); 4] = [
    (
        "s1",
        include_str!("../../scenarios/s1.toml"),
        include_str!("../../scenarios/s1.map"),
    ),
    (
        "s2",
        include_str!("../../scenarios/s2.toml"),
        include_str!("../../scenarios/s2.map"),
    ),
    (
        "s3",
        include_str!("../../scenarios/s3.toml"),
        include_str!("../../scenarios/s3.map"),
    ),
    (
        "s4",
        include_str!("../../scenarios/s4.toml"),
        include_str!("../../scenarios/s4.map"),
    ),
];

impl Scenario {
    pub fn builtin_ids() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(id, _, _)| *id)
    }

    /// One of the bundled scenarios `s1`..`s4`.
    pub fn builtin(id: &str) -> Result<Scenario, ScenarioError> {
        let (_, doc, map) = BUILTIN
            .iter()
            .find(|(name, _, _)| *name == id)
            .ok_or_else(|| ScenarioError::UnknownBuiltin(id.to_string()))?;
        Self::parse(doc, |_| Ok((*map).to_string()))
    }

    /// Reads a scenario document from disk; its `map` path is resolved
    /// relative to the document.
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, |map| {
            let map_path = base.join(map);
            std::fs::read_to_string(&map_path).map_err(|source| ScenarioError::Io {
                path: map_path.display().to_string(),
                source,
            })
        })
    }

    /// A bundled scenario id, or otherwise a path to a scenario document.
    pub fn resolve(name: &str) -> Result<Scenario, ScenarioError> {
        if BUILTIN.iter().any(|(id, _, _)| *id == name) {
            Self::builtin(name)
        } else {
            Self::load(Path::new(name))
        }
    }

    pub fn parse(
        text: &str,
        read_map: impl FnOnce(&str) -> Result<String, ScenarioError>,
    ) -> Result<Scenario, ScenarioError> {
        let doc: ScenarioDoc =
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        let _ = doc.description;
        let map_text = match (doc.map_text, doc.map) {
            (Some(inline), None) => inline,
            (None, Some(path)) => read_map(&path)?,
            _ => {
                return Err(ScenarioError::Invalid(
                    "exactly one of `map` or `map_text` is required".into(),
                ))
            }
        };
        let world = load_map(&map_text)?;
        let resolve = |entry: &ScriptEntry| -> Result<(f64, GoalId), ScenarioError> {
            let mut chars = entry.goal.chars();
            let label = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(ScenarioError::UnknownGoal(entry.goal.clone())),
            };
            let goal = world
                .goal_by_label(label)
                .ok_or_else(|| ScenarioError::UnknownGoal(entry.goal.clone()))?;
            Ok((entry.time, goal.id))
        };
        let intent_script = doc
            .intent
            .iter()
            .map(|e| resolve(e).map(|(time, goal)| IntentSwitch { time, goal }))
            .collect::<Result<Vec<_>, _>>()?;
        let airm_script = doc
            .airm
            .iter()
            .map(|e| resolve(e).map(|(time, goal)| AirmClickEvent { time, goal }))
            .collect::<Result<Vec<_>, _>>()?;
        let scenario = Scenario {
            id: doc.id,
            world,
            intent_script,
            airm_script,
            random_pair: doc.random_pair,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let n = self.world.goals.len();
        if n < 2 {
            return Err(ScenarioError::Invalid(format!(
                "a scenario needs at least 2 goals, map has {n}"
            )));
        }
        let Some(first) = self.intent_script.first() else {
            return Err(ScenarioError::Invalid("intent script is empty".into()));
        };
        if first.time != 0.0 {
            return Err(ScenarioError::Invalid(
                "first intent switch must be at time 0".into(),
            ));
        }
        if self
            .intent_script
            .windows(2)
            .any(|w| !(w[1].time > w[0].time))
        {
            return Err(ScenarioError::Invalid(
                "intent switch times must be strictly increasing".into(),
            ));
        }
        if self
            .airm_script
            .iter()
            .any(|c| !(c.time.is_finite() && c.time >= 0.0))
            || self.airm_script.windows(2).any(|w| w[1].time < w[0].time)
        {
            return Err(ScenarioError::Invalid(
                "airm click times must be non-negative and non-decreasing".into(),
            ));
        }
        let ids = self
            .intent_script
            .iter()
            .map(|s| s.goal)
            .chain(self.airm_script.iter().map(|c| c.goal));
        for id in ids {
            if id.index() >= n {
                return Err(ScenarioError::UnknownGoal(format!("#{}", id.index())));
            }
        }
        if let Some(pair) = &self.random_pair {
            if !(pair.switch_time.is_finite() && pair.switch_time > 0.0) {
                return Err(ScenarioError::Invalid(
                    "random_pair.switch_time must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// Resolves seed-dependent parts (the random goal pair) into concrete
    /// scripts. Scenarios without a random pair are returned unchanged.
    pub fn for_seed(&self, seed: u64) -> Scenario {
        let Some(pair) = self.random_pair else {
            return self.clone();
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let n = self.world.goals.len();
        let first = rng.random_range(0..n);
        let mut second = rng.random_range(0..n - 1);
        if second >= first {
            second += 1;
        }
        let (first, second) = (GoalId(first), GoalId(second));
        let intent_script = vec![
            IntentSwitch {
                time: 0.0,
                goal: first,
            },
            IntentSwitch {
                time: pair.switch_time,
                goal: second,
            },
        ];
        let airm_script = if pair.airm_clicks {
            intent_script
                .iter()
                .map(|s| AirmClickEvent {
                    time: s.time,
                    goal: s.goal,
                })
                .collect()
        } else {
            Vec::new()
        };
        Scenario {
            id: self.id.clone(),
            world: self.world.clone(),
            intent_script,
            airm_script,
            random_pair: None,
        }
    }

    /// Goal the operator intends at `tick`.
    pub fn true_goal_at(&self, tick: u64, tick_rate: f64) -> GoalId {
        self.intent_script
            .iter()
            .take_while(|s| time_to_tick(s.time, tick_rate) <= tick)
            .last()
            .map(|s| s.goal)
            .unwrap_or(self.intent_script[0].goal)
    }

    /// First tick at which the final scripted intent is in force.
    pub fn final_switch_tick(&self, tick_rate: f64) -> u64 {
        self.intent_script
            .last()
            .map(|s| time_to_tick(s.time, tick_rate))
            .unwrap_or(0)
    }

    pub fn final_goal(&self) -> GoalId {
        self.intent_script[self.intent_script.len() - 1].goal
    }

    /// Clicks scheduled for `tick`.
    pub fn airm_clicks_at(&self, tick: u64, tick_rate: f64) -> impl Iterator<Item = GoalId> + '_ {
        self.airm_script
            .iter()
            .filter(move |c| time_to_tick(c.time, tick_rate) == tick)
            .map(|c| c.goal)
    }
}

/// Converts a scripted time to the tick it takes effect on.
pub fn time_to_tick(time: f64, tick_rate: f64) -> u64 {
    (time * tick_rate).round().max(0.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAP: &str = "resolution 1\na...b\n.....\n..S..\n";

    fn parse(doc: &str) -> Result<Scenario, ScenarioError> {
        Scenario::parse(doc, |_| Ok(MAP.to_string()))
    }

    #[test]
    fn parses_scripts() {
        let s = parse(
            r#"
id = "t"
map = "x.map"
[[intent]]
time = 0.0
goal = "b"
[[intent]]
time = 4.0
goal = "a"
[[airm]]
time = 4.0
goal = "a"
"#,
        )
        .unwrap();
        assert_eq!(s.intent_script.len(), 2);
        assert_eq!(s.true_goal_at(0, 10.0), GoalId(1));
        assert_eq!(s.true_goal_at(39, 10.0), GoalId(1));
        assert_eq!(s.true_goal_at(40, 10.0), GoalId(0));
        assert_eq!(s.airm_clicks_at(40, 10.0).collect::<Vec<_>>(), vec![GoalId(0)]);
        assert_eq!(s.airm_clicks_at(41, 10.0).count(), 0);
        assert_eq!(s.final_switch_tick(10.0), 40);
    }

    #[test]
    fn rejects_bad_scripts() {
        let unknown = parse("id='t'\nmap='m'\n[[intent]]\ntime=0.0\ngoal='z'\n");
        assert!(matches!(unknown, Err(ScenarioError::UnknownGoal(_))));
        let empty = parse("id='t'\nmap='m'\n");
        assert!(matches!(empty, Err(ScenarioError::Invalid(_))));
        let late_start = parse("id='t'\nmap='m'\n[[intent]]\ntime=1.0\ngoal='a'\n");
        assert!(matches!(late_start, Err(ScenarioError::Invalid(_))));
        let unordered = parse(
            "id='t'\nmap='m'\n[[intent]]\ntime=0.0\ngoal='a'\n[[intent]]\ntime=0.0\ngoal='b'\n",
        );
        assert!(matches!(unordered, Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn random_pair_is_seeded() {
        let s = parse(
            "id='t'\nmap='m'\n[[intent]]\ntime=0.0\ngoal='a'\n[random_pair]\nswitch_time=5.0\nairm_clicks=true\n",
        )
        .unwrap();
        let a = s.for_seed(3);
        assert_eq!(a, s.for_seed(3));
        assert_eq!(a.intent_script.len(), 2);
        assert_ne!(a.intent_script[0].goal, a.intent_script[1].goal);
        assert_eq!(a.airm_script.len(), 2);
        let distinct: std::collections::BTreeSet<_> = (0..32)
            .map(|seed| {
                let r = s.for_seed(seed);
                (r.intent_script[0].goal, r.intent_script[1].goal)
            })
            .collect();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn builtins_load() {
        for id in Scenario::builtin_ids() {
            let s = Scenario::builtin(id).unwrap();
            assert_eq!(s.id, id);
        }
        assert!(Scenario::builtin("s9").is_err());
    }
}
