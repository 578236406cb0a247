"""Synthetic double round-robin league data for demos and tests.

Simulates seasons of a 20-team league: latent team strengths drive
expected goals, goals are Poisson draws, and the full statistic roster
is generated to co-move plausibly with performance. Values are rounded
the way published match stats are (counts, one or two decimals).

The CSV writer can emit the minimal schema or a wide layout that also
carries the prunable text columns and a handful of extra descriptors,
mirroring scraped data (7 descriptors + 34 stats + 5 prunable + 6 extra
= 52 columns).
"""

from __future__ import annotations

import csv
import datetime as dt

import numpy as np

from .dataset import DEFAULT_STAT_ROSTER, MatchRecord

TEAM_NAMES = (
    "Ashgrove", "Barrow Vale", "Calder Rovers", "Dunmore Town", "Eastfield",
    "Farnley", "Glenside", "Harwick City", "Ivel Athletic", "Jarrow Bay",
    "Kestrel Park", "Lowton", "Marsden United", "Norcroft", "Oakhall",
    "Penwick", "Quarry Hill", "Ravenstone", "Silverholme", "Tarnbrook",
)

EXTRA_COLUMNS = ("time", "comp", "round", "day", "attendance", "stage")
PRUNABLE_TEXT = {
    "match report": "Match Report",
    "notes": "",
    "referee": "A. Official",
    "captain": "C. Skipper",
    "formation": "4-3-3",
}


def round_robin_rounds(n_teams: int) -> list[list[tuple[int, int]]]:
    """Circle-method schedule: n-1 rounds of (home, away) index pairs."""
    teams = list(range(n_teams))
    rounds = []
    for r in range(n_teams - 1):
        pairs = []
        for i in range(n_teams // 2):
            a, b = teams[i], teams[n_teams - 1 - i]
            pairs.append((a, b) if (r + i) % 2 == 0 else (b, a))
        rounds.append(pairs)
        teams = [teams[0]] + [teams[-1]] + teams[1:-1]
    return rounds


def _side_stats(rng, xg, xga, gf, ga, poss, strength):
    sh = int(max(gf, round(xg * 6.5 + rng.normal(0, 2))))
    sot = int(min(sh, max(gf, round(sh * 0.36 + rng.normal(0, 1)))))
    att = int(max(150, round(380 + 9 * (poss - 50) + rng.normal(0, 25))))
    cmp_ = int(round(att * min(0.95, max(0.5, 0.74 + 0.03 * strength + rng.normal(0, 0.02)))))
    stats = {
        "gf": float(gf),
        "ga": float(ga),
        "xg": round(xg, 2),
        "xga": round(xga, 2),
        "poss": float(round(poss)),
        "sh": float(sh),
        "sot": float(sot),
        "dist": round(float(np.clip(rng.normal(16.5, 1.8), 8.0, 30.0)), 1),
        "fk": float(rng.poisson(0.5)),
        "pk": 0.0,
        "pkatt": 0.0,
        "sca": float(max(sot, rng.poisson(max(0.5, xg * 8.5)))),
        "gca": float(max(gf, rng.poisson(max(0.2, xg * 1.6)))),
        "cmp": float(cmp_),
        "att": float(att),
        "cmp_pct": round(100.0 * cmp_ / att, 1),
        "prgp": float(rng.poisson(max(5.0, 38 + 8 * strength))),
        "prgc": float(rng.poisson(max(3.0, 18 + 4 * strength))),
        "crs": float(rng.poisson(14.0)),
        "tkl": float(rng.poisson(max(4.0, 17 - 2 * strength))),
        "tklw": 0.0,
        "int": float(rng.poisson(max(2.0, 9 - strength))),
        "blocks": float(rng.poisson(max(2.0, 10 + xga))),
        "clr": float(rng.poisson(max(4.0, 20 + 3 * xga))),
        "err": float(rng.poisson(0.3)),
        "touches": float(int(round(att * 1.45 + rng.normal(0, 30)))),
        "carries": 0.0,
        "fls": float(rng.poisson(10.5)),
        "off": float(rng.poisson(1.8)),
        "crdy": float(rng.poisson(1.7)),
        "crdr": float(rng.poisson(0.07)),
        "sv": 0.0,  # filled once the opponent's sot is known
        "save_pct": 0.0,
        "cs": float(ga == 0),
    }
    if rng.random() < 0.25:
        stats["pkatt"] = 1.0
        stats["pk"] = float(rng.random() < 0.78)
    stats["tklw"] = float(min(stats["tkl"], rng.poisson(max(1.0, stats["tkl"] * 0.6))))
    stats["carries"] = float(int(round(stats["touches"] * 0.45 + rng.normal(0, 15))))
    return stats


def simulate_league(
    seasons: tuple[str, ...] = ("2021-2022", "2022-2023"),
    n_teams: int = 20,
    seed: int = 7,
    team_names: tuple[str, ...] | None = None,
) -> list[MatchRecord]:
    """Two perspectives per fixture for every matchweek of every season."""
    rng = np.random.default_rng(seed)
    names = (team_names or TEAM_NAMES)[:n_teams]
    if len(names) < n_teams:
        names = tuple(names) + tuple(f"Club {i:02d}" for i in range(len(names), n_teams))

    records: list[MatchRecord] = []
    for s_idx, season in enumerate(seasons):
        strength = rng.normal(0.0, 1.0, size=n_teams)
        start = dt.date(2021 + s_idx, 8, 7)
        first_half = round_robin_rounds(n_teams)
        schedule = first_half + [[(a2, h2) for (h2, a2) in rnd] for rnd in first_half]
        for week, pairs in enumerate(schedule, start=1):
            date = start + dt.timedelta(days=7 * (week - 1))
            for h, a in pairs:
                diff = strength[h] - strength[a]
                xg_h = float(max(0.05, 1.35 + 0.55 * diff + 0.20 + rng.normal(0, 0.22)))
                xg_a = float(max(0.05, 1.35 - 0.55 * diff - 0.20 + rng.normal(0, 0.22)))
                gf_h = int(rng.poisson(xg_h))
                gf_a = int(rng.poisson(xg_a))
                poss_h = float(np.clip(50 + 6.5 * diff + rng.normal(0, 4), 25, 75))

                home_stats = _side_stats(rng, xg_h, xg_a, gf_h, gf_a, poss_h, strength[h])
                away_stats = _side_stats(rng, xg_a, xg_h, gf_a, gf_h, 100 - poss_h, strength[a])
                for mine, theirs in ((home_stats, away_stats), (away_stats, home_stats)):
                    opp_sot = theirs["sot"]
                    mine["sv"] = float(max(0.0, opp_sot - mine["ga"]))
                    mine["save_pct"] = round(100.0 * mine["sv"] / opp_sot, 1) if opp_sot else 0.0

                res_h, res_a = ("W", "L") if gf_h > gf_a else (("L", "W") if gf_h < gf_a else ("D", "D"))
                records.append(
                    MatchRecord(date, season, week, names[h], names[a], "Home", res_h, home_stats)
                )
                records.append(
                    MatchRecord(date, season, week, names[a], names[h], "Away", res_a, away_stats)
                )
    return records


def write_csv(
    records: list[MatchRecord],
    path,
    wide: bool = True,
    missing_rate: float = 0.0,
    seed: int = 0,
) -> tuple[int, int]:
    """Write records as a CSV; returns (data rows, columns).

    `wide` adds the prunable text columns and extra descriptors so the
    header reaches the 52-column scraped-data shape. `missing_rate`
    blanks that fraction of statistic cells (to exercise imputation).
    """
    rng = np.random.default_rng(seed)
    stats = list(records[0].stats.keys()) if records else list(DEFAULT_STAT_ROSTER)
    header = ["date", "season", "matchweek", "team", "opponent", "venue", "result"]
    if wide:
        header += list(EXTRA_COLUMNS)
    header += stats
    if wide:
        header += list(PRUNABLE_TEXT.keys())

    def fmt(v: float) -> str:
        return str(int(v)) if float(v).is_integer() else repr(round(float(v), 4))

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in records:
            row = [
                r.date.isoformat(), r.season, str(r.matchweek),
                r.team, r.opponent, r.venue, r.result,
            ]
            if wide:
                row += [
                    "15:00", "Premier League", f"Matchweek {r.matchweek}",
                    r.date.strftime("%a"), str(int(rng.integers(18000, 62000))),
                    "regular",
                ]
            for s in stats:
                v = r.stats[s]
                blank = missing_rate > 0 and rng.random() < missing_rate
                row.append("" if blank or v is None else fmt(v))
            if wide:
                row += list(PRUNABLE_TEXT.values())
            w.writerow(row)
    return len(records), len(header)
