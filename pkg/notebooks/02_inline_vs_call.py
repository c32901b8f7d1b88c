# %% [markdown]
# # Inline arithmetic versus a function call
#
# Each model is timed twice over the same index: once with the arithmetic
# written in the loop body, once with the loop calling a function. The
# equivalence gate checks that both forms produce the same checksum before
# anything is timed.

# %%
from callcost import Model, build_index, generate_synthetic_corpus, run_comparison
from callcost.report import build_report

index, stats = build_index(generate_synthetic_corpus(1000, 15000, 100, seed=1))
print(index)

# %%
results = [run_comparison(model, index, stats, reps=3, warmup=1) for model in Model]
print(build_report(results, unit="ms").to_markdown())

# %% [markdown]
# If the cost of a call is roughly fixed, the per-call figure should stay
# similar across models while the percentage shrinks as the payload grows.

# %%
for r in results:
    print(f"{r.model.value:>8}: {r.overhead_pct:6.1f} %  {r.per_call_cost:6.1f} ns/call")
