//! Per-team structural and content metrics.

mod centrality;
mod contribution;
mod leadership;
mod response;
mod sentiment;
mod team;

pub use centrality::{betweenness, centralization, degree, ActorScores, ScoreKind};
pub use contribution::{awvci, contribution_index, member_traffic, traffic, weighted_ci_variance, Traffic};
pub use leadership::{
    count_handovers, leaders_from_surface, leadership_series, temporal_surface, LeaderSeries, TemporalSurface,
};
pub use response::{normalize_subject, response_times, ResponseStats, DEFAULT_CUTOFF_MINUTES};
pub use sentiment::{
    daily_sentiment, parse_word_list, sentiment_score, strip_quotes_and_signature, team_sentiment, tokenize,
    SentimentLexicon, SentimentScore, TeamSentiment,
};
pub use team::{team_analysis, team_metrics, MetricsConfig, StrongTie, TeamAnalysis, TeamMetricsRow, METRIC_COLUMNS};
