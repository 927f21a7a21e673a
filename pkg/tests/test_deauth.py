"""Deauth-race detector: both signatures, repetition requirement."""

from wids.detect import DetectorConfig
from wids.detect.alerts import AlertKind
from wids.detect.deauth import DeauthRaceDetector

from conftest import AP, CLIENT, T0, FrameFactory

SEC = 1_000_000


def drive(frames):
    det = DeauthRaceDetector(DetectorConfig())
    alerts = []
    for f in frames:
        if f.subtype == 12:
            alert = det.on_deauth(f)
        else:
            alert = det.on_connection_frame(f)
        if alert:
            alerts.append(alert)
    return alerts, det


def race_round(ff, t, client=CLIENT):
    """Attack round from the capture in the write-up: forged deauth slips
    between the association request and its response."""
    return [
        ff.assoc_req(t, client),
        ff.deauth(t + 1000, AP, client, reason=7),
        ff.assoc_resp(t + 2000, client),
        ff.eapol(t + 4000, AP, client, nr=1),
        ff.deauth(t + 6000, client, AP, reason=7),
    ]


def test_two_rounds_alert(ff):
    frames = race_round(ff, T0) + race_round(ff, T0 + 2 * SEC)
    alerts, _ = drive(frames)
    assert alerts
    assert alerts[0].kind is AlertKind.DEAUTH_RACE
    assert CLIENT in alerts[0].victim_addrs


def test_single_event_stays_quiet(ff):
    # one deauth followed by a lone association request: one abnormal
    # event on the books, below the repetition threshold
    frames = [
        ff.deauth(T0, AP, CLIENT, reason=7),
        ff.assoc_req(T0 + 1000, CLIENT),
    ]
    alerts, det = drive(frames)
    assert alerts == []
    assert len(det.events) == 1


def test_sig1_connection_frame_after_deauth(ff):
    frames = [
        ff.deauth(T0, AP, CLIENT, reason=7),
        ff.assoc_req(T0 + 500_000, CLIENT),
    ]
    _, det = drive(frames)
    assert len(det.events) == 1


def test_sig1_window_is_three_seconds(ff):
    frames = [
        ff.deauth(T0, AP, CLIENT, reason=7),
        ff.assoc_req(T0 + 3 * SEC + 1000, CLIENT),
    ]
    _, det = drive(frames)
    assert det.events == []


def test_benign_disconnect_and_slow_reconnect(ff):
    # reason 3 leave, reconnect five seconds later: outside every window
    frames = [
        ff.deauth(T0, CLIENT, AP, reason=3),
        ff.assoc_req(T0 + 5 * SEC, CLIENT),
        ff.assoc_resp(T0 + 5 * SEC + 2000, CLIENT),
        ff.eapol(T0 + 5 * SEC + 4000, AP, CLIENT, nr=1),
    ]
    alerts, det = drive(frames)
    assert alerts == [] and det.events == []


def test_sig2_needs_reason_7(ff):
    frames = [
        ff.assoc_req(T0, CLIENT),
        ff.assoc_resp(T0 + 2000, CLIENT),
        ff.deauth(T0 + 4000, CLIENT, AP, reason=3),
    ]
    _, det = drive(frames)
    assert det.events == []


def test_sig2_full_sequence(ff):
    frames = [
        ff.assoc_req(T0, CLIENT),
        ff.assoc_resp(T0 + 2000, CLIENT),
        ff.deauth(T0 + 4000, CLIENT, AP, reason=7),
    ]
    _, det = drive(frames)
    assert len(det.events) == 1


def test_events_expire_outside_ten_seconds(ff):
    frames = race_round(ff, T0)[:4] + race_round(ff, T0 + 30 * SEC)[:4]
    alerts, _ = drive(frames)
    # each round alone crosses threshold? a round yields 2+ events itself
    # so this checks the expiry path via the detector's window pruning
    assert all(a.detected_at_us - T0 < 10 * SEC or
               a.detected_at_us - T0 >= 30 * SEC for a in alerts)


def test_other_ap_traffic_ignored(ff):
    other = "02:00:00:00:aa:01"
    f = ff.deauth(T0, other, CLIENT, reason=7)
    _, det = drive([f, ff.assoc_req(T0 + 1000, CLIENT)])
    # deauth not involving the protected AP leaves no recorded deauth time
    assert det.deauth_time.get(CLIENT) is None
