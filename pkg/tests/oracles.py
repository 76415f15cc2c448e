"""Slow, obviously-correct reference computations used only by tests."""

from fractions import Fraction


def pairwise_auc(bad, good) -> Fraction:
    """P(bad < good) + P(tie)/2 by explicit double loop, in exact arithmetic."""
    doubled = 0
    for b in bad:
        for g in good:
            if b < g:
                doubled += 2
            elif b == g:
                doubled += 1
    return Fraction(doubled, 2 * len(bad) * len(good))


def total_error(bad, good, cutoff) -> Fraction:
    """Type I + type II for the rule value > cutoff => GOOD, exactly."""
    missed = sum(1 for b in bad if b > cutoff)
    alarms = sum(1 for g in good if g <= cutoff)
    return Fraction(missed, len(bad)) + Fraction(alarms, len(good))


def min_total_error(bad, good) -> Fraction:
    """Smallest achievable total error over every threshold.

    Each partition of the sorted values is reached by a threshold equal to
    an observed value, or one below the minimum.
    """
    values = sorted(set(bad) | set(good))
    thresholds = [values[0] - 1] + values
    return min(total_error(bad, good, t) for t in thresholds)


def pearson(xs, ys) -> float:
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    return sxy / (sxx * syy) ** 0.5
