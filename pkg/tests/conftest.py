import pytest

from wids.detect import DetectorConfig, IdsEngine
from wids.frames import (
    AUTH_ALG_SAE,
    SAE_COMMIT,
    SAE_CONFIRM,
    STATUS_SUCCESS,
    SUBTYPE_ASSOC_REQ,
    SUBTYPE_ASSOC_RESP,
    SUBTYPE_AUTH,
    SUBTYPE_BEACON,
    SUBTYPE_DEAUTH,
    SUBTYPE_PROBE_RESP,
    TYPE_DATA,
    TYPE_MANAGEMENT,
    AssocReqBody,
    AssocRespBody,
    AuthBody,
    BeaconBody,
    DeauthBody,
    EapolKeyBody,
    FrameRecord,
    RsnInfo,
)

AP = "02:00:00:00:01:01"
CLIENT = "02:00:00:00:02:01"
T0 = 1_622_505_600_000_000


class FrameFactory:
    """Hand-rolled frames for detector tests, numbered as they are made."""

    def __init__(self, ap: str = AP):
        self.ap = ap
        self.n = 0

    def _next(self) -> int:
        self.n += 1
        return self.n

    def commit(self, ts, src, dst=None, status=STATUS_SUCCESS, group=19,
               retry=False):
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_MANAGEMENT,
            subtype=SUBTYPE_AUTH, source_addr=src,
            receiver_addr=dst or self.ap, bssid=self.ap, seq_num=self.n,
            is_retry=retry,
            body=AuthBody(auth_alg=AUTH_ALG_SAE, auth_seq=SAE_COMMIT,
                          status_code=status, sae_group=group))

    def confirm(self, ts, src, dst=None, status=STATUS_SUCCESS):
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_MANAGEMENT,
            subtype=SUBTYPE_AUTH, source_addr=src,
            receiver_addr=dst or self.ap, bssid=self.ap, seq_num=self.n,
            body=AuthBody(auth_alg=AUTH_ALG_SAE, auth_seq=SAE_CONFIRM,
                          status_code=status))

    def beacon(self, ts, bssid=None, ssid="lab-net", akms=(8,), count=None):
        bssid = bssid or self.ap
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_MANAGEMENT,
            subtype=SUBTYPE_BEACON, source_addr=bssid,
            receiver_addr="ff:ff:ff:ff:ff:ff", bssid=bssid, seq_num=self.n,
            body=BeaconBody(tsf_timestamp=ts - T0, beacon_interval=100,
                            ssid=ssid,
                            rsn=RsnInfo(akm_count=count or len(akms),
                                        akm_types=tuple(akms))))

    def probe_resp(self, ts, bssid=None, ssid="lab-net", dst=CLIENT):
        bssid = bssid or self.ap
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_MANAGEMENT,
            subtype=SUBTYPE_PROBE_RESP, source_addr=bssid,
            receiver_addr=dst, bssid=bssid, seq_num=self.n,
            body=BeaconBody(tsf_timestamp=ts - T0, beacon_interval=100,
                            ssid=ssid,
                            rsn=RsnInfo(akm_count=1, akm_types=(8,))))

    def assoc_req(self, ts, src):
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_MANAGEMENT,
            subtype=SUBTYPE_ASSOC_REQ, source_addr=src,
            receiver_addr=self.ap, bssid=self.ap, seq_num=self.n,
            body=AssocReqBody(ssid="lab-net", rsn=None))

    def assoc_resp(self, ts, dst, status=STATUS_SUCCESS):
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_MANAGEMENT,
            subtype=SUBTYPE_ASSOC_RESP, source_addr=self.ap,
            receiver_addr=dst, bssid=self.ap, seq_num=self.n,
            body=AssocRespBody(status_code=status, aid=1))

    def deauth(self, ts, src, dst, reason=7):
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_MANAGEMENT,
            subtype=SUBTYPE_DEAUTH, source_addr=src, receiver_addr=dst,
            bssid=self.ap, seq_num=self.n,
            body=DeauthBody(reason_code=reason))

    def eapol(self, ts, src, dst, nr=1):
        return FrameRecord(
            frame_number=self._next(), ts_us=ts, frame_type=TYPE_DATA,
            subtype=0, source_addr=src, receiver_addr=dst, bssid=self.ap,
            seq_num=self.n, body=EapolKeyBody(message_nr=nr))


@pytest.fixture
def ff():
    return FrameFactory()


@pytest.fixture
def cfg():
    return DetectorConfig()


@pytest.fixture
def engine():
    return IdsEngine()


def run_engine(frames, cfg=None):
    engine = IdsEngine(cfg)
    alerts = []
    for frame in frames:
        alerts.extend(engine.process(frame))
    return alerts, engine
