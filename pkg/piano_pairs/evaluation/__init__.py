from piano_pairs.evaluation.aggregation import aggregate, filter_records
from piano_pairs.evaluation.outcomes import OutcomeRecord, classify_outcome, load_records, write_records
from piano_pairs.evaluation.rendering import render_report
