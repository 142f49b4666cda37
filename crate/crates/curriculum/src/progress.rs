//! Competence histories and the sliding-window progress measure.

use crate::CurriculumError;

/// Absolute discrete derivative of a score series over its 2N most recent
/// entries: |sum of last N - sum of previous N| / 2N.
///
/// The absolute value makes a competence drop register as high progress, so a
/// regressing difficulty gets re-prioritized instead of forgotten. Returns
/// `None` while fewer than 2N scores exist.
pub fn competence_progress(scores: &[f64], window_half: usize) -> Option<f64> {
    let n = window_half;
    if n == 0 || scores.len() < 2 * n {
        return None;
    }
    let window = &scores[scores.len() - 2 * n..];
    let older: f64 = window[..n].iter().sum();
    let recent: f64 = window[n..].iter().sum();
    Some((recent - older).abs() / (2 * n) as f64)
}

/// Chronological evaluation scores per accuracy level, measured together at
/// each evaluation sweep.
#[derive(Debug, Clone, Default)]
pub struct CompetenceHistory {
    steps: Vec<u64>,
    scores: Vec<Vec<f64>>,
}

impl CompetenceHistory {
    pub fn new(num_accuracies: usize) -> Self {
        CompetenceHistory {
            steps: Vec::new(),
            scores: vec![Vec::new(); num_accuracies],
        }
    }

    /// Append one evaluation sweep: a score in [0, 1] for every accuracy,
    /// measured at a step strictly after the previous sweep.
    pub fn record(&mut self, step: u64, sweep: &[f64]) -> Result<(), CurriculumError> {
        if sweep.len() != self.scores.len() {
            return Err(CurriculumError::BadRecord(format!(
                "expected {} scores, got {}",
                self.scores.len(),
                sweep.len()
            )));
        }
        if sweep.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(CurriculumError::BadRecord(format!(
                "scores must lie in [0, 1], got {sweep:?}"
            )));
        }
        if let Some(&last) = self.steps.last() {
            if step <= last {
                return Err(CurriculumError::BadRecord(format!(
                    "measurement step {step} not after previous step {last}"
                )));
            }
        }
        self.steps.push(step);
        for (series, &score) in self.scores.iter_mut().zip(sweep) {
            series.push(score);
        }
        Ok(())
    }

    /// Number of recorded sweeps (identical across accuracy levels).
    pub fn sweeps(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn scores_for(&self, accuracy_index: usize) -> &[f64] {
        &self.scores[accuracy_index]
    }

    /// Progress for one accuracy level, or `None` on a too-short history.
    pub fn progress(&self, accuracy_index: usize, window_half: usize) -> Option<f64> {
        competence_progress(&self.scores[accuracy_index], window_half)
    }

    /// Progress for every accuracy level, available only once each series has
    /// 2N entries.
    pub fn progress_all(&self, window_half: usize) -> Option<Vec<f64>> {
        self.scores
            .iter()
            .map(|s| competence_progress(s, window_half))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_competence_has_zero_progress() {
        assert_eq!(competence_progress(&[0.4; 6], 3), Some(0.0));
    }

    #[test]
    fn step_up_measures_half() {
        let cp = competence_progress(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 3).unwrap();
        assert!((cp - 0.5).abs() < 1e-15);
    }

    #[test]
    fn step_down_measures_half_too() {
        // Absolute value: a drop counts as much as a rise.
        let cp = competence_progress(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0], 3).unwrap();
        assert!((cp - 0.5).abs() < 1e-15);
    }

    #[test]
    fn short_history_is_unavailable() {
        assert_eq!(competence_progress(&[0.1; 5], 3), None);
        assert_eq!(competence_progress(&[], 3), None);
        assert_eq!(competence_progress(&[0.1; 6], 0), None);
    }

    #[test]
    fn only_the_most_recent_window_counts() {
        // Old prefix must be ignored entirely.
        let mut scores = vec![0.9, 0.1, 0.7];
        scores.extend_from_slice(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let cp = competence_progress(&scores, 3).unwrap();
        assert!((cp - 0.5).abs() < 1e-15);
    }

    #[test]
    fn history_keeps_series_aligned() {
        let mut h = CompetenceHistory::new(4);
        h.record(1000, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        h.record(2000, &[0.2, 0.3, 0.4, 0.5]).unwrap();
        assert_eq!(h.sweeps(), 2);
        assert_eq!(h.scores_for(2), &[0.3, 0.4]);
        assert_eq!(h.steps(), &[1000, 2000]);
    }

    #[test]
    fn history_rejects_bad_records() {
        let mut h = CompetenceHistory::new(2);
        assert!(h.record(1000, &[0.1]).is_err());
        assert!(h.record(1000, &[0.1, 1.2]).is_err());
        h.record(1000, &[0.1, 0.2]).unwrap();
        assert!(h.record(1000, &[0.1, 0.2]).is_err());
        assert!(h.record(500, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn progress_all_requires_full_histories() {
        let mut h = CompetenceHistory::new(2);
        for k in 0..5 {
            h.record(1000 * (k + 1), &[0.1, 0.2]).unwrap();
        }
        assert_eq!(h.progress_all(3), None);
        h.record(6000, &[0.1, 0.2]).unwrap();
        assert!(h.progress_all(3).is_some());
    }
}
