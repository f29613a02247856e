//! Active emotions, per-type thresholds and decay, and the mood scalar.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wfn::{Name, Symbol};

pub const MAX_INTENSITY: f64 = 10.0;
pub const MOOD_RANGE: f64 = 10.0;
/// Mood moves by this fraction of an accepted emotion's effective intensity.
pub const MOOD_WEIGHT: f64 = 0.3;
/// Mood relaxes toward zero by this much per tick.
pub const MOOD_DECAY_PER_TICK: f64 = 0.05;
/// Emotions weaker than this are dropped after decay.
pub const REMOVAL_FLOOR: f64 = 0.1;
pub const DEFAULT_HALF_LIFE: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valence {
    Positive,
    Negative,
}

impl Valence {
    pub fn sign(self) -> f64 {
        match self {
            Valence::Positive => 1.0,
            Valence::Negative => -1.0,
        }
    }
}

/// The 22 OCC emotion types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmotionType {
    Joy,
    Distress,
    #[serde(rename = "Happy-For")]
    HappyFor,
    Gloating,
    Resentment,
    Pity,
    Pride,
    Shame,
    Admiration,
    Reproach,
    Gratification,
    Remorse,
    Gratitude,
    Anger,
    Love,
    Hate,
    Hope,
    Fear,
    Satisfaction,
    #[serde(rename = "Fears-Confirmed")]
    FearsConfirmed,
    Relief,
    Disappointment,
}

impl EmotionType {
    pub const ALL: [EmotionType; 22] = [
        EmotionType::Joy,
        EmotionType::Distress,
        EmotionType::HappyFor,
        EmotionType::Gloating,
        EmotionType::Resentment,
        EmotionType::Pity,
        EmotionType::Pride,
        EmotionType::Shame,
        EmotionType::Admiration,
        EmotionType::Reproach,
        EmotionType::Gratification,
        EmotionType::Remorse,
        EmotionType::Gratitude,
        EmotionType::Anger,
        EmotionType::Love,
        EmotionType::Hate,
        EmotionType::Hope,
        EmotionType::Fear,
        EmotionType::Satisfaction,
        EmotionType::FearsConfirmed,
        EmotionType::Relief,
        EmotionType::Disappointment,
    ];

    pub fn valence(self) -> Valence {
        use EmotionType::*;
        match self {
            Joy | HappyFor | Gloating | Pride | Admiration | Gratification | Gratitude | Love | Hope
            | Satisfaction | Relief => Valence::Positive,
            Distress | Resentment | Pity | Shame | Reproach | Remorse | Anger | Hate | Fear
            | FearsConfirmed | Disappointment => Valence::Negative,
        }
    }

    pub fn name(self) -> &'static str {
        use EmotionType::*;
        match self {
            Joy => "Joy",
            Distress => "Distress",
            HappyFor => "Happy-For",
            Gloating => "Gloating",
            Resentment => "Resentment",
            Pity => "Pity",
            Pride => "Pride",
            Shame => "Shame",
            Admiration => "Admiration",
            Reproach => "Reproach",
            Gratification => "Gratification",
            Remorse => "Remorse",
            Gratitude => "Gratitude",
            Anger => "Anger",
            Love => "Love",
            Hate => "Hate",
            Hope => "Hope",
            Fear => "Fear",
            Satisfaction => "Satisfaction",
            FearsConfirmed => "Fears-Confirmed",
            Relief => "Relief",
            Disappointment => "Disappointment",
        }
    }
}

impl fmt::Display for EmotionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown emotion type '{0}'")]
pub struct UnknownEmotionType(pub String);

impl FromStr for EmotionType {
    type Err = UnknownEmotionType;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        EmotionType::ALL
            .into_iter()
            .find(|t| {
                let candidate: String = t.name().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
                candidate.eq_ignore_ascii_case(&wanted)
            })
            .ok_or_else(|| UnknownEmotionType(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emotion {
    #[serde(rename = "type")]
    pub kind: EmotionType,
    pub intensity: f64,
    pub cause: Name,
    pub target: Symbol,
    pub created: u64,
}

impl Emotion {
    pub fn new(kind: EmotionType, intensity: f64, cause: Name, target: Symbol, created: u64) -> Self {
        Emotion { kind, intensity, cause, target, created }
    }

    pub fn valence(&self) -> Valence {
        self.kind.valence()
    }
}

/// Per-type thresholds and half-lives.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionalDisposition {
    pub thresholds: BTreeMap<EmotionType, f64>,
    pub half_lives: BTreeMap<EmotionType, f64>,
}

impl EmotionalDisposition {
    pub fn threshold(&self, kind: EmotionType) -> f64 {
        self.thresholds.get(&kind).copied().unwrap_or(0.0)
    }

    pub fn half_life(&self, kind: EmotionType) -> f64 {
        self.half_lives.get(&kind).copied().unwrap_or(DEFAULT_HALF_LIFE)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmotionalState {
    emotions: Vec<Emotion>,
    mood: f64,
    disposition: EmotionalDisposition,
}

impl EmotionalState {
    pub fn new(disposition: EmotionalDisposition) -> Self {
        EmotionalState { emotions: Vec::new(), mood: 0.0, disposition }
    }

    /// Restore a saved state as-is: no thresholds applied, mood untouched by
    /// the listed emotions.
    pub fn from_parts(disposition: EmotionalDisposition, mood: f64, emotions: Vec<Emotion>) -> Self {
        let emotions = emotions
            .into_iter()
            .filter(|e| e.intensity >= REMOVAL_FLOOR)
            .map(|mut e| {
                e.intensity = e.intensity.min(MAX_INTENSITY);
                e
            })
            .collect();
        EmotionalState { emotions, mood: mood.clamp(-MOOD_RANGE, MOOD_RANGE), disposition }
    }

    pub fn with_mood(mut self, mood: f64) -> Self {
        self.set_mood(mood);
        self
    }

    pub fn disposition(&self) -> &EmotionalDisposition {
        &self.disposition
    }

    pub fn emotions(&self) -> &[Emotion] {
        &self.emotions
    }

    pub fn mood_value(&self) -> f64 {
        self.mood
    }

    pub fn set_mood(&mut self, mood: f64) {
        self.mood = mood.clamp(-MOOD_RANGE, MOOD_RANGE);
    }

    pub fn add_emotion(&mut self, emotion: Emotion) -> bool {
        self.insert(emotion).is_some()
    }

    /// Insert after threshold subtraction; returns the effective intensity of
    /// an accepted emotion.
    ///
    /// An emotion with the same type and cause replaces the existing one only
    /// when stronger, and mood moves only by the increase.
    pub fn insert(&mut self, mut emotion: Emotion) -> Option<f64> {
        if emotion.intensity.is_nan() || emotion.intensity <= 0.0 {
            return None;
        }
        let effective = (emotion.intensity - self.disposition.threshold(emotion.kind)).min(MAX_INTENSITY);
        if effective <= 0.0 {
            return None;
        }
        let sign = emotion.valence().sign();
        if let Some(existing) =
            self.emotions.iter_mut().find(|e| e.kind == emotion.kind && e.cause == emotion.cause)
        {
            if effective <= existing.intensity {
                return None;
            }
            let increase = effective - existing.intensity;
            existing.intensity = effective;
            existing.created = emotion.created;
            existing.target = emotion.target;
            self.set_mood(self.mood + sign * MOOD_WEIGHT * increase);
            return Some(effective);
        }
        emotion.intensity = effective;
        self.emotions.push(emotion);
        self.set_mood(self.mood + sign * MOOD_WEIGHT * effective);
        Some(effective)
    }

    /// Exponential half-life decay of every emotion plus linear mood
    /// relaxation toward zero.
    pub fn decay(&mut self, ticks: u64) {
        if ticks == 0 {
            return;
        }
        let t = ticks as f64;
        for emotion in &mut self.emotions {
            let half_life = self.disposition.half_life(emotion.kind);
            emotion.intensity *= 0.5f64.powf(t / half_life);
        }
        self.emotions.retain(|e| e.intensity >= REMOVAL_FLOOR);
        let relax = (MOOD_DECAY_PER_TICK * t).min(self.mood.abs());
        self.mood -= self.mood.signum() * relax;
    }

    /// Highest intensity; ties go to the most recently created.
    pub fn strongest_emotion(&self) -> Option<&Emotion> {
        self.emotions.iter().fold(None, |best: Option<&Emotion>, e| match best {
            Some(b) if b.intensity > e.intensity || (b.intensity == e.intensity && b.created > e.created) => Some(b),
            _ => Some(e),
        })
    }

    pub fn intensity_of(&self, kind: EmotionType) -> f64 {
        self.emotions.iter().filter(|e| e.kind == kind).map(|e| e.intensity).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emotion(kind: EmotionType, intensity: f64, tick: u64) -> Emotion {
        Emotion::new(
            kind,
            intensity,
            Name::parse(&format!("Event(Action-End, A, Act{tick}, B)")).unwrap(),
            Symbol::new("B").unwrap(),
            tick,
        )
    }

    #[test]
    fn valence_follows_type() {
        let positive = EmotionType::ALL.iter().filter(|t| t.valence() == Valence::Positive).count();
        assert_eq!(positive, 11);
        assert_eq!(EmotionType::Joy.valence(), Valence::Positive);
        assert_eq!(EmotionType::Distress.valence(), Valence::Negative);
    }

    #[test]
    fn names_round_trip() {
        for t in EmotionType::ALL {
            assert_eq!(t.name().parse::<EmotionType>().unwrap(), t);
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.name()));
        }
        assert_eq!("fears confirmed".parse::<EmotionType>().unwrap(), EmotionType::FearsConfirmed);
        assert!("Boredom".parse::<EmotionType>().is_err());
    }

    #[test]
    fn joy_raises_mood() {
        let mut state = EmotionalState::default();
        assert!(state.add_emotion(emotion(EmotionType::Joy, 5.0, 0)));
        assert!((state.mood_value() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn below_threshold_rejected() {
        let mut disposition = EmotionalDisposition::default();
        disposition.thresholds.insert(EmotionType::Joy, 3.0);
        let mut state = EmotionalState::new(disposition);
        assert!(!state.add_emotion(emotion(EmotionType::Joy, 2.0, 0)));
        assert!(state.emotions().is_empty());
        assert_eq!(state.mood_value(), 0.0);
        assert_eq!(state.insert(emotion(EmotionType::Joy, 5.0, 0)), Some(2.0));
    }

    #[test]
    fn mood_clamps_at_bottom() {
        let mut state = EmotionalState::default().with_mood(-9.0);
        assert!(state.add_emotion(emotion(EmotionType::Distress, 10.0, 0)));
        assert_eq!(state.mood_value(), -10.0);
    }

    #[test]
    fn decay_halves_after_half_life() {
        let mut state = EmotionalState::default();
        state.add_emotion(emotion(EmotionType::Joy, 4.0, 0));
        state.decay(8);
        assert!((state.emotions()[0].intensity - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decay_zero_is_noop() {
        let mut state = EmotionalState::default();
        state.add_emotion(emotion(EmotionType::Joy, 4.0, 0));
        let before = state.clone();
        state.decay(0);
        assert_eq!(state, before);
    }

    #[test]
    fn weak_emotions_removed() {
        let mut state = EmotionalState::default();
        state.add_emotion(emotion(EmotionType::Joy, 0.15, 0));
        state.decay(8);
        assert!(state.emotions().is_empty());
    }

    #[test]
    fn mood_relaxes_linearly() {
        let mut state = EmotionalState::default().with_mood(-3.0);
        state.decay(10);
        assert!((state.mood_value() + 2.5).abs() < 1e-12);
        let mut state = EmotionalState::default().with_mood(0.1);
        state.decay(10);
        assert_eq!(state.mood_value(), 0.0);
    }

    #[test]
    fn strongest_breaks_ties_by_recency() {
        let mut state = EmotionalState::default();
        assert!(state.strongest_emotion().is_none());
        assert_eq!(state.mood_value(), 0.0);
        state.add_emotion(emotion(EmotionType::Joy, 5.0, 1));
        state.add_emotion(emotion(EmotionType::Fear, 3.0, 2));
        assert_eq!(state.strongest_emotion().unwrap().kind, EmotionType::Joy);
        state.add_emotion(emotion(EmotionType::Distress, 5.0, 4));
        assert_eq!(state.strongest_emotion().unwrap().kind, EmotionType::Distress);
    }

    #[test]
    fn repeated_emotion_keeps_stronger() {
        let mut state = EmotionalState::default();
        let cause = emotion(EmotionType::Joy, 4.0, 0);
        assert!(state.add_emotion(cause.clone()));
        assert!(!state.add_emotion(Emotion { intensity: 3.0, ..cause.clone() }));
        assert!(state.add_emotion(Emotion { intensity: 6.0, ..cause }));
        assert_eq!(state.emotions().len(), 1);
        assert_eq!(state.emotions()[0].intensity, 6.0);
        assert!((state.mood_value() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn multiple_emotions_coexist() {
        let mut state = EmotionalState::default();
        state.add_emotion(emotion(EmotionType::Distress, 6.0, 0));
        state.add_emotion(emotion(EmotionType::Admiration, 4.0, 0));
        assert_eq!(state.emotions().len(), 2);
        assert!(state.intensity_of(EmotionType::Distress) > 0.0);
        assert!(state.intensity_of(EmotionType::Admiration) > 0.0);
    }
}
