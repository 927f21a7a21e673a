"""Beacon RSNE downgrade detector."""

from wids.detect import DetectorConfig
from wids.detect.alerts import AlertKind
from wids.detect.downgrade import DowngradeDetector

from conftest import AP, T0, FrameFactory

SEC = 1_000_000


def drive(beacons, restarts=()):
    det = DowngradeDetector(DetectorConfig())
    stream = sorted([(f.ts_us, "f", f) for f in beacons]
                    + [(ts, "r", ts) for ts in restarts])
    alerts = []
    for _, what, item in stream:
        if what == "r":
            det.on_restart(item)
        else:
            alert = det.on_frame(item)
            if alert:
                alerts.append(alert)
    return alerts


def interleaved(ff, start, duration_s, legit_akms=(8,), spoof_akms=(2,)):
    frames = []
    end = start + round(duration_s * SEC)
    for ts in range(start, end, 102_400):
        frames.append(ff.beacon(ts, akms=legit_akms))
    for ts in range(start + 51_200, end, 16_384):
        frames.append(ff.beacon(ts, akms=spoof_akms))
    return sorted(frames, key=lambda f: f.ts_us)


def test_sae_to_psk_flip_alerts_fast(ff):
    frames = interleaved(ff, T0, 3)
    alerts = drive(frames)
    assert alerts
    assert alerts[0].kind is AlertKind.WPA2_DOWNGRADE
    assert alerts[0].detected_at_us - T0 < 5 * SEC
    assert alerts[0].victim_addrs == (AP,)


def test_transition_mode_with_count_change_alerts(ff):
    frames = interleaved(ff, T0, 3, legit_akms=(2, 8), spoof_akms=(2,))
    alerts = drive(frames)
    assert alerts and alerts[0].kind is AlertKind.WPA2_DOWNGRADE


def test_steady_transition_beacons_are_quiet(ff):
    frames = [ff.beacon(T0 + i * 102_400, akms=(2, 8)) for i in range(300)]
    assert drive(frames) == []


def test_steady_sae_beacons_are_quiet(ff):
    frames = [ff.beacon(T0 + i * 102_400) for i in range(300)]
    assert drive(frames) == []


def test_reconfiguration_after_long_gap_is_ignored(ff):
    frames = [ff.beacon(T0 + i * 102_400) for i in range(100)]
    resume = frames[-1].ts_us + 15 * SEC
    frames += [ff.beacon(resume + i * 102_400, akms=(2,)) for i in range(100)]
    assert drive(frames) == []


def test_three_events_in_five_seconds_not_enough(ff):
    frames = []
    t = T0
    # three SAE->PSK flips, well spread
    for i in range(3):
        frames.append(ff.beacon(t, akms=(8,)))
        frames.append(ff.beacon(t + 100_000, akms=(2,)))
        t += 1_500_000
    assert drive(frames) == []


def test_other_network_beacons_do_not_count(ff):
    rogue = "02:00:00:00:09:09"
    frames = []
    for i in range(40):
        ts = T0 + i * 50_000
        frames.append(ff.beacon(ts, akms=(8,)))
        frames.append(ff.beacon(ts + 10_000, bssid=rogue,
                                ssid="other", akms=(2,)))
    assert drive(frames) == []


def test_restart_window_suppresses_events(ff):
    frames = interleaved(ff, T0, 3)
    # restart signal lands early in the burst: the events already recorded
    # are purged retroactively, later ones fall inside the quiet window
    assert drive(frames, restarts=[T0 + 200_000]) == []


def test_events_resume_after_restart_window(ff):
    restart = T0
    frames = interleaved(ff, T0 + 11 * SEC, 3)
    alerts = drive(frames, restarts=[restart])
    assert alerts and alerts[0].kind is AlertKind.WPA2_DOWNGRADE
