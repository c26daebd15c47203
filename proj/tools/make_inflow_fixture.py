"""Writes data/folsom_inflow_fixture.csv: 65 synthetic water years (1955-10 .. 2020-09)
shaped like Folsom's monthly inflow regime. Fixed seed; rerunning reproduces the file."""

import pathlib

import numpy as np

MEANS_TAF = [40, 90, 230, 330, 380, 420, 430, 470, 280, 90, 40, 30]  # Oct..Sep
MONTH_SIGMA = [0.45, 0.6, 0.7, 0.65, 0.6, 0.5, 0.45, 0.45, 0.5, 0.45, 0.35, 0.3]
YEAR_SIGMA = 0.55
YEAR_AR1 = 0.2
FIRST_YEAR = 1955
YEARS = 65


def main() -> None:
    rng = np.random.default_rng(20240601)
    wet = 0.0
    rows = []
    prev_resid = 0.0
    for y in range(YEARS):
        wet = YEAR_AR1 * wet + np.sqrt(1 - YEAR_AR1**2) * rng.standard_normal()
        for m in range(12):
            prev_resid = 0.5 * prev_resid + np.sqrt(1 - 0.25) * rng.standard_normal()
            sigma = MONTH_SIGMA[m]
            log_flow = (np.log(MEANS_TAF[m]) - 0.5 * (sigma**2 + YEAR_SIGMA**2)
                        + YEAR_SIGMA * wet + sigma * prev_resid)
            cal_month = (m + 9) % 12 + 1
            cal_year = FIRST_YEAR + y + (1 if cal_month < 10 else 0)
            rows.append((cal_year, cal_month, float(np.exp(log_flow))))
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "folsom_inflow_fixture.csv"
    with out.open("w", newline="\n") as f:
        f.write("year,month,flow_taf\n")
        for year, month, flow in rows:
            f.write(f"{year},{month},{flow:.3f}\n")


if __name__ == "__main__":
    main()
