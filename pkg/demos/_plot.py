"""Optional plotting helper: demos print numbers and save a figure only
when matplotlib is installed."""
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:          # numbers are still printed
    plt = None


def save(fig, name):
    fig.savefig(name, dpi=120, bbox_inches="tight")
    print(f"saved {name}")
