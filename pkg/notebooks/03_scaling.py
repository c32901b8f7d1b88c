# %% [markdown]
# # How time grows with the size of the index
#
# The index is concatenated with renamed copies of itself and the tf-idf
# kernels are timed at each size. A least-squares line summarises the trend.

# %%
from callcost import Form, Model, build_index, generate_synthetic_corpus, run_scaling
from callcost.report import plot_data_text

index, stats = build_index(generate_synthetic_corpus(1000, 15000, 100, seed=1))
rep = run_scaling(Model.TFIDF, index, stats, factors=[1, 5, 10, 15, 20], reps=3)

# %%
print(plot_data_text(rep.series(), rep.fits))
for form in Form:
    fit = rep.fits[form]
    print(f"{form.value:>6}: {fit.slope:.1f} ns/word, r2={fit.r2:.4f}")
for w in rep.warnings:
    print("warning:", w)

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    xs = [row[0] for row in rep.series()]
    for i, form in enumerate(Form, start=1):
        fit = rep.fits[form]
        plt.plot(xs, [row[i] / 1e6 for row in rep.series()], "o", label=form.value)
        plt.plot(xs, [(fit.intercept + fit.slope * x) / 1e6 for x in xs], "--")
    plt.xlabel("words in index")
    plt.ylabel("mean time (ms)")
    plt.legend()
    plt.savefig("scaling.png", dpi=120)
