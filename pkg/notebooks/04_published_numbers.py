# %% [markdown]
# # Re-deriving the published overheads and linearity
#
# The original measurements came from another runtime, so only their
# arithmetic can be checked: overhead percentages from the averaged times,
# and how well a straight line fits the scaling table.

# %%
from callcost import linear_fit, overhead_pct

pairs = {
    "tf-idf": (27.7957, 42.2777),
    "BM25": (45.5493, 65.2803),
    "modified BM25": (57.5558, 74.8626),
}
for name, (inline, call) in pairs.items():
    print(f"{name:>14}: {overhead_pct(inline, call):.2f} %")

# %%
words = [21624, 108120, 216240, 324360, 432480]
inline = [47.0267, 245.3276, 462.7964, 667.1601, 900.3907]
call = [69.7313, 357.9202, 674.7660, 969.4582, 1309.5847]
for label, ys in (("inline", inline), ("call", call)):
    fit = linear_fit(zip(words, ys))
    print(f"{label:>6}: slope={fit.slope:.6f} per word, intercept={fit.intercept:.3f}, r2={fit.r2:.5f}")
for w, a, b in zip(words, inline, call):
    print(f"{w:>7} words: {overhead_pct(a, b):.2f} %")
