import pytest

from skedfit.ingest import ingest_bts_csv
from skedfit.instance import InstanceError

HEADER = ("FL_DATE,OP_UNIQUE_CARRIER,TAIL_NUM,ORIGIN,DEST,"
          "CRS_DEP_TIME,CRS_ARR_TIME")


def write_csv(tmp_path, rows, header=HEADER):
    path = tmp_path / "sched.csv"
    path.write_text("\n".join([header] + rows) + "\n")
    return path


GOOD_ROWS = [
    "2018-03-01,UA,N100,ORD,MCO,0800,1104",
    "2018-03-01,UA,N100,MCO,ORD,1200,1507",
    "2018-03-01,UA,N200,DEN,SEA,0700,0900",   # never visits the hub
    "2018-03-01,UA,N200,SEA,DEN,1000,1200",
    "2018-03-01,UA,N300,ORD,IAH,0845,1147",
    "2018-03-01,UA,N300,IAH,ORD,1232,1535",
    "2018-03-01,AA,N400,ORD,BOS,0900,1200",   # other carrier
    "2018-03-02,UA,N500,ORD,BOS,0900,1200",   # other day
]


def test_basic_ingestion(tmp_path):
    path = write_csv(tmp_path, GOOD_ROWS)
    inst = ingest_bts_csv(path, hub="ORD", carrier="UA", date="2018-03-01")
    assert len(inst.routes) == 2          # hubless N200 removed
    assert len(inst.existing) == 4
    tails = {r.tail for r in inst.routes}
    assert tails == {"N100", "N300"}


def test_block_time_split(tmp_path):
    path = write_csv(tmp_path, GOOD_ROWS)
    inst = ingest_bts_csv(path, hub="ORD", carrier="UA", date="2018-03-01")
    # 08:00 -> 11:04 is a 184-minute block: cruise cap 154, floor 130.9
    first = next(f for f in inst.flights.values()
                 if f.origin == "ORD" and f.dest == "MCO")
    lo, hi = first.cruise_bounds["INGESTED"]
    assert hi == pytest.approx(154.0)
    assert lo == pytest.approx(130.9)
    assert first.non_cruise == 30.0
    assert lo == pytest.approx(0.85 * hi, abs=1e-9)


def test_departure_windows(tmp_path):
    path = write_csv(tmp_path, GOOD_ROWS)
    inst = ingest_bts_csv(path, hub="ORD", carrier="UA", date="2018-03-01")
    first = next(f for f in inst.flights.values()
                 if f.origin == "ORD" and f.dest == "MCO")
    assert first.dep_window == (480.0 - 90.0, 480.0 + 90.0)


def test_overnight_arrival_extends_clock(tmp_path):
    rows = ["2018-03-01,UA,N100,ORD,MCO,2230,0120"]
    path = write_csv(tmp_path, rows)
    inst = ingest_bts_csv(path, hub="ORD")
    fl = next(iter(inst.flights.values()))
    assert fl.orig_arrival == pytest.approx(24 * 60 + 80.0)


def test_missing_column(tmp_path):
    header = "FL_DATE,OP_UNIQUE_CARRIER,ORIGIN,DEST,CRS_DEP_TIME,CRS_ARR_TIME"
    path = write_csv(tmp_path, ["2018-03-01,UA,ORD,MCO,0800,1104"], header)
    with pytest.raises(InstanceError, match="TAIL_NUM"):
        ingest_bts_csv(path, hub="ORD")


def test_non_chronological_tail(tmp_path):
    rows = [
        "2018-03-01,UA,N100,ORD,MCO,0800,1104",
        "2018-03-01,UA,N100,MCO,ORD,1000,1300",  # departs before arrival
    ]
    path = write_csv(tmp_path, rows)
    with pytest.raises(InstanceError, match="chronological"):
        ingest_bts_csv(path, hub="ORD")


def test_no_hub_visitors(tmp_path):
    rows = ["2018-03-01,UA,N200,DEN,SEA,0700,0900"]
    path = write_csv(tmp_path, rows)
    with pytest.raises(InstanceError, match="hub"):
        ingest_bts_csv(path, hub="ORD")


def test_custom_column_names(tmp_path):
    header = "day,carrier,tail,orig,dst,dep,arr"
    rows = ["2018-03-01,UA,N100,ORD,MCO,0800,1104"]
    path = write_csv(tmp_path, rows, header)
    inst = ingest_bts_csv(path, hub="ORD", columns={
        "date": "day", "carrier": "carrier", "tail": "tail",
        "origin": "orig", "dest": "dst", "dep": "dep", "arr": "arr"})
    assert len(inst.existing) == 1
