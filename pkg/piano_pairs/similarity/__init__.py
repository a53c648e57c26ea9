from piano_pairs.similarity.baseline import BaselineProvider, baseline_embed
from piano_pairs.similarity.embedding import EmbeddingProvider, StyleEmbedding, cosine_distance, cosine_similarity
from piano_pairs.similarity.store import PrecomputedProvider, load_precomputed, save_embeddings
