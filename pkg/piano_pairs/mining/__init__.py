from piano_pairs.mining.export import PairRecord, export_pairs, import_pairs
from piano_pairs.mining.miner import MiningReport, keep_most_similar, mine
from piano_pairs.mining.pairs import Variation, VariationPair, enumerate_pairs
from piano_pairs.mining.split import split_by_piece, validation_pieces
