import pytest

SUMMARY_HEADER = (
    "scenario,exchanges,learning,social_capital,day,mean_satisfaction,"
    "mean_sat_social,mean_sat_selfish,social_proportion,optimum"
)
DAYS_HEADER = (
    "run,day,scenario,exchanges,learning,social_capital,mean_satisfaction,"
    "mean_sat_social,mean_sat_selfish,social_count,optimum,exchanges_accepted,"
    "favours_recorded,favours_repaid"
)


def write_bundle(path, summary_rows, day_rows):
    path.mkdir(parents=True, exist_ok=True)
    (path / "summary.csv").write_text(
        "\n".join([SUMMARY_HEADER, *summary_rows]) + "\n", encoding="utf-8"
    )
    (path / "days.csv").write_text(
        "\n".join([DAYS_HEADER, *day_rows]) + "\n", encoding="utf-8"
    )
    return path


@pytest.fixture
def tiny_bundle(tmp_path):
    """Two exchange levels x both ledger arms x three days, mixed scenario."""
    summary = []
    days = []
    for sc, sc_text in ((True, "true"), (False, "false")):
        for exchanges in (1, 10):
            for day in (1, 2, 3):
                sat = 0.2 + 0.1 * day + (0.05 if sc else 0.0) + exchanges / 100.0
                summary.append(
                    f"mixed,{exchanges},0.500000,{sc_text},{day},{sat:.6f},"
                    f"{sat + 0.02:.6f},{sat - 0.02:.6f},0.500000,0.910000"
                )
                for run in (0, 1):
                    days.append(
                        f"{run},{day},mixed,{exchanges},0.500000,{sc_text},"
                        f"{sat:.6f},{sat + 0.02:.6f},{sat - 0.02:.6f},48,"
                        f"0.910000,3,1,0"
                    )
    return write_bundle(tmp_path / "bundle", summary, days)
