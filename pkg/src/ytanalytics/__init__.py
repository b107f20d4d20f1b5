"""Sentiment, toxicity, topic and content-recommendation analysis of video corpora."""

from .corpus import Corpus, CorpusError, VideoRecord, load_corpus, month_buckets, save_corpus
from .coverage import (aggregate_coverage, coverage_by_size, coverage_over_time, coverage_report,
                       cumulative_coverage)
from .pipeline import PipelineConfig, run_pipeline
from .sentiment import classify_sentiment, load_lexicon, score_compound
from .simrec import AttributeProfile, Recommender, SparseVector, cosine, tfidf_vectorize
from .textprep import PrepOptions, TokenStream, Vocabulary, build_vocabulary, tokenize
from .topics import count_vectorize, dominant_topic, fit_lda, select_topic_count, top_terms
from .toxicity import classify_toxicity, load_external_scores, score_toxicity_lexicon

__version__ = "0.1.0"
