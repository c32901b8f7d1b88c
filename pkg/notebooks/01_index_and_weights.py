# %% [markdown]
# # Building an inverted index and weighting its terms
#
# The index maps every word to its document frequency and a per-document
# term frequency. Here we build the small "rocket" example by hand, then a
# synthetic Zipfian corpus, and compute the three weights.

# %%
from callcost import (
    Bm25Params,
    Document,
    build_index,
    bm25_modified_weight,
    bm25_weight,
    generate_synthetic_corpus,
    tfidf_weight,
)

docs = [
    Document("doc_11", ("rocket",) * 7 + ("orbit",)),
    Document("doc_15", ("rocket",) * 2 + ("launch", "orbit")),
    Document("doc_67", ("rocket",) * 4),
]
index, stats = build_index(docs)
print(index["rocket"])
print(f"d={stats.d}, avdl={stats.avdl:.3f}")

# %% [markdown]
# Weights for "rocket" in doc_11, as if the collection had 4573 documents.

# %%
tf, df, d = 7, 3, 4573
print("tf-idf        ", tfidf_weight(tf, df, d))
print("BM25          ", bm25_weight(tf, df, d, dl=120, avdl=100))
print("BM25 (padded) ", bm25_modified_weight(tf, df, d, dl=120, avdl=100, pad=100.0))
print("BM25 k1=2 b=.75", bm25_weight(tf, df, d, 120, 100, Bm25Params(2.0, 0.75)))

# %% [markdown]
# A synthetic corpus at roughly the scale of a few thousand abstracts.

# %%
corpus = generate_synthetic_corpus(num_docs=4573, vocab_size=21624, mean_dl=100, seed=7)
big, big_stats = build_index(corpus)
print(big, f"avdl={big_stats.avdl}")
top = sorted(big.items(), key=lambda kv: -kv[1].df)[:5]
for word, entry in top:
    print(f"{word:>10}  df={entry.df}")
