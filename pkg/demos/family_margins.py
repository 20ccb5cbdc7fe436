"""Two stability stories: how ties are broken, and how a safety margin
decays along a family of increasingly stubborn potentials.

The first half samples random potentials, perturbs each one just enough
to make the best orbit unique, and tallies how often the clean
structure (unique orbit on both sides, matching critical sets, positive
loss elsewhere) holds.  The second half follows a family of
distance-like potentials whose goodness margin — the smallest toll paid
to enter the best cycle from outside — shrinks geometrically as the
family parameter grows, which is exactly what makes the later members
numerically treacherous and exact arithmetic worthwhile.

Run with:  python3 demos/family_margins.py
"""

from fractions import Fraction

from shiftopt import (build_de_bruijn, calibrated_subaction, error_function,
                      goodness_check, goodness_on_graph, leplaideur_member,
                      lipschitz_mean_gap, max_mean_cycle, perturb_to_unique,
                      projection_error_bound, sample_generic_suite,
                      subaction_regularity_gap)

F = Fraction


def main():
    print("sampled tie-breaking, 30 random depth-2 potentials:")
    raw = sample_generic_suite(seed=11, count=30, depth=2, perturb=False)
    fixed = sample_generic_suite(seed=11, count=30, depth=2, perturb=True)
    for label, rep in (("raw", raw), ("perturbed", fixed)):
        c = rep.counts()
        print(f"  {label:9s} unique {c['unique']}/30, both sides good "
              f"{min(c['good'], c['good_dual'])}/30")

    pot = perturb_to_unique(leplaideur_member(1, F(1, 2), 8), F(0))
    gap, norm = lipschitz_mean_gap(pot, pot.add_constant(F(1, 100)))
    print(f"\nmean value moves at most as far as the potential: "
          f"|dm| = {gap} <= {norm} = perturbation size")
    sem, bound = subaction_regularity_gap(pot, F(1, 2))
    print(f"subaction inherits regularity: seminorm {sem} <= bound {bound}")

    print("\ndistance-family margin decay (exact rationals):")
    prev = None
    for n in (1, 2, 3):
        depth = 2 * n + 6
        member = leplaideur_member(n, F(1, 2), depth)
        good = goodness_check(member)
        g = build_de_bruijn(2, depth, member)
        cs = max_mean_cycle(g)
        r = error_function(g, cs, calibrated_subaction(g, cs))
        self_margin = goodness_on_graph(g, cs, r).margin
        err = projection_error_bound(member.family, depth)
        ratio = "" if prev is None else f"   ({float(good.margin / prev):.3f}x)"
        print(f"  n={n} depth={depth}: good={good.good} "
              f"margin={good.margin}{ratio}")
        print(f"          self-margin check {self_margin} "
              f"(equal: {self_margin == good.margin}), "
              f"tail truncation error <= {err}")
        prev = good.margin


if __name__ == "__main__":
    main()
