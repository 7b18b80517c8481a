"""Record console test fixtures from a live engine.

Runs the real service in-process and captures the payloads the console tests
replay. Regenerate with:

    python3 frontend/scripts/record_fixtures.py

The captured states are genuine engine output; the feedback-loop test only
passes if blacklisting really reorders the ranking, so this script fails fast
when the crafted data stops producing a reorder.
"""

import json
from datetime import datetime
from pathlib import Path

from fastapi.testclient import TestClient

from fraudlens import AnalysisEngine, EngineConfig, Event, EventStore
from fraudlens.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "console.json"


def ts(raw: str) -> datetime:
    return datetime.strptime(raw, "%Y-%m-%dT%H:%M")


def build_events() -> list[Event]:
    events = []
    # c1: monthly pre-billing touches by e1, one same-day pair, one e2 visit
    for month in range(1, 7):
        events.append(Event(ts(f"2014-{month:02d}-14T09:00"), "e1", "c1", "payment_entry"))
    events.append(Event(ts("2014-03-14T11:30"), "e1", "c1", "login"))
    events.append(Event(ts("2014-04-02T10:00"), "e2", "c1", "view_account", "crm"))
    # c2: sparse benign activity spread over employees
    events.append(Event(ts("2014-01-20T10:00"), "e1", "c2", "login"))
    events.append(Event(ts("2014-02-11T11:00"), "e2", "c2", "view_account"))
    events.append(Event(ts("2014-04-07T09:30"), "e3", "c2", "update_contact"))
    # c3: 21-day rhythm far from its billing day, suspect profile; lands
    # exactly 1/21 above c2 so blacklisting c2 (+2/21) swaps them strictly
    events.append(Event(ts("2014-02-05T10:15"), "e1", "c3", "login"))
    events.append(Event(ts("2014-02-26T11:00"), "e2", "c3", "view_account"))
    events.append(Event(ts("2014-03-19T13:00"), "e3", "c3", "login"))
    # c4: single weekend event
    events.append(Event(ts("2014-03-08T12:00"), "e3", "c4", "login"))
    return events


def build_config() -> EngineConfig:
    return EngineConfig.from_dict(
        {
            "profiles": [
                {"client_id": "c1", "billing_day": 15},
                {"client_id": "c2", "billing_day": 3},
                {"client_id": "c3", "billing_day": 17, "status": "suspect"},
                {"client_id": "c4"},
            ],
            "shifts": [
                {
                    "employee_id": emp,
                    "shifts": {
                        d: ["08:00", "16:00"] for d in ("mon", "tue", "wed", "thu", "fri")
                    },
                }
                for emp in ("e1", "e2", "e3")
            ],
        }
    )


def snapshot_state(client: TestClient) -> dict:
    return {
        "rankings": client.get("/api/rankings/clients").json(),
        "manifest": client.get("/api/frames").json(),
        "stacked": client.get("/api/layouts/stacked-bars?k=6").json(),
    }


def main() -> None:
    store = EventStore()
    store.add_events(build_events())
    engine = AnalysisEngine(store, build_config())
    client = TestClient(create_app(engine))

    before = snapshot_state(client)
    order_before = [c["client_id"] for c in before["rankings"]["clients"]]
    original_status = {
        c: engine.effective_profile(c).status for c in order_before
    }

    # find a client whose blacklisting genuinely reorders the ranking
    target = None
    for candidate in order_before:
        client.post(f"/api/clients/{candidate}/status", json={"status": "blacklisted"})
        changed = [c["client_id"] for c in client.get("/api/rankings/clients").json()["clients"]]
        if changed != order_before:
            target = candidate
            after = snapshot_state(client)
            break
        client.post(f"/api/clients/{candidate}/status", json={"status": original_status[candidate]})
    assert target is not None, "no candidate reorders the ranking; adjust the data"

    client.post(f"/api/clients/{target}/status", json={"status": original_status[target]})
    reverted = snapshot_state(client)
    assert [c["client_id"] for c in reverted["rankings"]["clients"]] == order_before
    assert reverted["rankings"]["digest"] == before["rankings"]["digest"]

    top = order_before[0]
    fixture = {
        "before": before,
        "after": after,
        "blacklist_target": target,
        "top_client": top,
        "layouts": client.get(f"/api/clients/{top}/layouts").json(),
        "layered": client.get("/api/layouts/layered").json(),
        "series": client.get(f"/api/clients/{top}/series").json(),
        "frame_svg": client.get("/api/frames/0").text,
        "factors": client.get("/api/config/factors").json(),
    }
    OUT.write_text(json.dumps(fixture, indent=1, sort_keys=True))
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes), blacklist target {target}, top {top}")


if __name__ == "__main__":
    main()
