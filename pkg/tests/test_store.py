import json
import threading

import pytest

from rulebench.equivalence import canonicalize
from rulebench.parser import ParseError, parse_formula
from rulebench.pipeline import TranslationCandidate, TranslationResult
from rulebench.store import (
    ACCEPTED,
    EDITED,
    PENDING,
    REJECTED,
    IllegalTransition,
    ReviewEntry,
    ReviewStore,
    StoreCorrupt,
    apply_review_decision,
    entry_to_dict,
)


def make_result(rule_id="r1", text="G(p)"):
    formula = parse_formula(text)
    candidate = TranslationCandidate(
        sample_index=0,
        raw_output=f"FINAL_MTL: {text}",
        formula=formula,
        canonical=canonicalize(formula),
    )
    return TranslationResult(
        rule_text="rule text",
        rule_id=rule_id,
        candidates=(candidate,),
        winner_index=0,
        vote_tally={text: 1},
    )


def make_entry(review_id="rev1", status=PENDING, **kwargs):
    defaults = dict(
        review_id=review_id,
        rule_id="r1",
        submitted_text="rule text",
        result=make_result(),
        status=status,
        created="2026-08-08T00:00:00+00:00",
        updated="2026-08-08T00:00:00+00:00",
    )
    defaults.update(kwargs)
    return ReviewEntry(**defaults)


def test_store_and_reload_byte_equal(tmp_path):
    store = ReviewStore(tmp_path)
    entry = make_entry()
    store.save(entry)
    del store

    reopened = ReviewStore(tmp_path)
    loaded = reopened.get("rev1")
    assert entry_to_dict(loaded) == entry_to_dict(entry)
    assert json.dumps(entry_to_dict(loaded), sort_keys=True) == json.dumps(
        entry_to_dict(entry), sort_keys=True
    )


def test_update_keeps_single_entry_and_advances_timestamp(tmp_path):
    store = ReviewStore(tmp_path)
    entry = make_entry()
    store.save(entry)
    updated = apply_review_decision(entry, ACCEPTED, now="2026-08-08T01:00:00+00:00")
    store.save(updated)

    reopened = ReviewStore(tmp_path)
    assert len(reopened) == 1
    final = reopened.get("rev1")
    assert final.status == ACCEPTED
    assert final.final_mtl == "G(p)"
    assert final.updated > final.created


def test_load_all_preserves_creation_order(tmp_path):
    store = ReviewStore(tmp_path)
    for i in range(3):
        store.save(make_entry(review_id=f"rev{i}"))
    store.save(apply_review_decision(store.get("rev0"), REJECTED))
    assert [e.review_id for e in store.load_all()] == ["rev0", "rev1", "rev2"]
    assert [e.review_id for e in store.load_all(status=PENDING)] == ["rev1", "rev2"]


def test_accept_defaults_to_winner_formula():
    entry = make_entry()
    accepted = apply_review_decision(entry, ACCEPTED)
    assert accepted.final_mtl == "G(p)"


def test_accept_with_matching_formula_allowed():
    accepted = apply_review_decision(make_entry(), ACCEPTED, final_mtl="G(p)")
    assert accepted.status == ACCEPTED


def test_accept_with_different_formula_rejected():
    with pytest.raises(ValueError):
        apply_review_decision(make_entry(), ACCEPTED, final_mtl="F(p)")


def test_accept_without_winner_rejected():
    result = TranslationResult(
        rule_text="t",
        rule_id="r1",
        candidates=(
            TranslationCandidate(sample_index=0, raw_output="junk", parse_error="junk"),
        ),
        winner_index=None,
        vote_tally={},
    )
    entry = make_entry(result=result)
    with pytest.raises(ValueError):
        apply_review_decision(entry, ACCEPTED)


def test_edit_requires_formula_that_differs():
    entry = make_entry()
    edited = apply_review_decision(entry, EDITED, final_mtl="G(p & q)")
    assert edited.status == EDITED
    with pytest.raises(ValueError):
        apply_review_decision(entry, EDITED)
    with pytest.raises(ValueError):
        apply_review_decision(entry, EDITED, final_mtl="G(p)")


def test_edit_with_unparseable_formula_raises_parse_error():
    with pytest.raises(ParseError):
        apply_review_decision(make_entry(), EDITED, final_mtl="G(p")


def test_terminal_states_cannot_change():
    entry = make_entry()
    accepted = apply_review_decision(entry, ACCEPTED)
    for target in (ACCEPTED, EDITED, REJECTED, PENDING):
        with pytest.raises(IllegalTransition):
            apply_review_decision(
                accepted, target, final_mtl="G(p & q)" if target == EDITED else None
            )


def test_pending_is_not_a_reachable_target():
    with pytest.raises(IllegalTransition):
        apply_review_decision(make_entry(), PENDING)


def test_unknown_status_rejected():
    with pytest.raises(ValueError):
        apply_review_decision(make_entry(), "approved")


def test_rejected_must_not_carry_formula():
    with pytest.raises(ValueError):
        apply_review_decision(make_entry(), REJECTED, final_mtl="G(p)")
    rejected = apply_review_decision(make_entry(), REJECTED, note="not a rule")
    assert rejected.status == REJECTED
    assert rejected.reviewer_note == "not a rule"


def test_save_enforces_entry_invariants(tmp_path):
    store = ReviewStore(tmp_path)
    with pytest.raises(ParseError):
        store.save(make_entry(status=ACCEPTED, final_mtl="G(p"))
    with pytest.raises(ValueError):
        store.save(make_entry(status=ACCEPTED))


def test_corrupt_log_reports_location(tmp_path):
    store = ReviewStore(tmp_path)
    store.save(make_entry())
    log = tmp_path / ReviewStore.LOG_NAME
    with log.open("a", encoding="utf-8") as fh:
        fh.write("{broken json\n")
    with pytest.raises(StoreCorrupt) as exc_info:
        ReviewStore(tmp_path)
    assert str(log) in exc_info.value.location
    assert ":2" in exc_info.value.location


def test_compaction_keeps_latest_states(tmp_path):
    store = ReviewStore(tmp_path)
    entry = make_entry()
    store.save(entry)
    store.save(apply_review_decision(entry, ACCEPTED))
    store.save(make_entry(review_id="rev2"))
    assert len((tmp_path / ReviewStore.LOG_NAME).read_text().splitlines()) == 3
    store.compact()
    assert len((tmp_path / ReviewStore.LOG_NAME).read_text().splitlines()) == 2
    reopened = ReviewStore(tmp_path)
    assert reopened.get("rev1").status == ACCEPTED
    assert [e.review_id for e in reopened.load_all()] == ["rev1", "rev2"]


def test_concurrent_updates_serialize_one_winner(tmp_path):
    store = ReviewStore(tmp_path)
    entry = make_entry()
    store.save(entry)
    outcomes = []

    def attempt(status, final_mtl):
        try:
            current = store.get("rev1")
            store.save(apply_review_decision(current, status, final_mtl))
            outcomes.append(status)
        except (IllegalTransition, ValueError):
            pass

    threads = [
        threading.Thread(target=attempt, args=(ACCEPTED, None)),
        threading.Thread(target=attempt, args=(EDITED, "G(p & q)")),
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    # Both decisions may have read 'pending' concurrently, but the store never
    # corrupts and reloads to a single valid terminal entry.
    reopened = ReviewStore(tmp_path)
    assert len(reopened) == 1
    assert reopened.get("rev1").status in (ACCEPTED, EDITED)
