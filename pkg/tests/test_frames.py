from hypothesis import given
from hypothesis import strategies as st

import pytest

from wids.frames import (
    AKM_PSK,
    AKM_SAE,
    AUTH_ALG_SAE,
    SAE_GROUP_MODULUS_BITS,
    WEAK_SAE_GROUPS,
    AuthBody,
    BeaconBody,
    DispatchClass,
    FrameRecord,
    RsnInfo,
    classify,
    is_connection_request,
    mac,
    mac_bytes,
    mac_from_bytes,
)

from conftest import AP, CLIENT, FrameFactory


def test_mac_normalizes_case_and_separators():
    assert mac("AA-BB-CC-00-11-22") == "aa:bb:cc:00:11:22"
    assert mac("aa:bb:cc:00:11:22") == "aa:bb:cc:00:11:22"


def test_mac_rejects_garbage():
    with pytest.raises(ValueError):
        mac("not-a-mac")
    with pytest.raises(ValueError):
        mac("aa:bb:cc:00:11")


@given(st.binary(min_size=6, max_size=6))
def test_mac_bytes_round_trip(raw):
    assert mac_bytes(mac_from_bytes(raw)) == raw


def test_rsn_has_sae():
    assert RsnInfo(akm_count=1, akm_types=(AKM_SAE,)).has_sae
    assert RsnInfo(akm_count=2, akm_types=(AKM_PSK, AKM_SAE)).has_sae
    assert not RsnInfo(akm_count=1, akm_types=(AKM_PSK,)).has_sae


def test_weak_groups_are_the_mod_p_and_brainpool_ones():
    assert WEAK_SAE_GROUPS == frozenset({22, 23, 24, 27, 28, 29, 30})
    # every weak group has a strength entry, and 19 is the common baseline
    for g in WEAK_SAE_GROUPS:
        assert g in SAE_GROUP_MODULUS_BITS
    assert SAE_GROUP_MODULUS_BITS[19] == 256
    assert SAE_GROUP_MODULUS_BITS[21] == 521


def test_sae_message_type_only_for_sae():
    sae = AuthBody(auth_alg=AUTH_ALG_SAE, auth_seq=1, status_code=0)
    assert sae.sae_message_type == 1
    opn = AuthBody(auth_alg=0, auth_seq=1, status_code=0)
    assert opn.sae_message_type is None


def test_classify_buckets(ff):
    assert classify(ff.beacon(0)) is DispatchClass.ADVERTISEMENT
    assert classify(ff.commit(0, CLIENT)) is DispatchClass.AUTHENTICATION
    assert classify(ff.assoc_req(0, CLIENT)) is DispatchClass.ASSOCIATION
    assert classify(ff.assoc_resp(0, CLIENT)) is DispatchClass.ASSOCIATION
    assert classify(ff.deauth(0, AP, CLIENT)) is DispatchClass.DEAUTH
    assert classify(ff.eapol(0, AP, CLIENT)) is DispatchClass.EAPOL


@given(ftype=st.integers(0, 3), subtype=st.integers(0, 15))
def test_classify_is_total(ftype, subtype):
    frame = FrameRecord(frame_number=1, ts_us=0, frame_type=ftype,
                        subtype=subtype, source_addr=None,
                        receiver_addr=None, bssid=None, seq_num=None)
    assert classify(frame) in DispatchClass


def test_connection_request_needs_all_conditions(ff):
    assert is_connection_request(ff.commit(0, CLIENT), AP)
    # confirm is not a request
    assert not is_connection_request(ff.confirm(0, CLIENT), AP)
    # the AP's own commit reply is not a request
    assert not is_connection_request(ff.commit(0, AP, CLIENT), AP)
    # directed at some other AP
    assert not is_connection_request(ff.commit(0, CLIENT, dst=CLIENT), AP)
    # open-system auth is not an SAE commit
    frame = ff.commit(0, CLIENT)
    open_auth = FrameRecord(
        frame_number=frame.frame_number, ts_us=0, frame_type=0, subtype=11,
        source_addr=CLIENT, receiver_addr=AP, bssid=AP, seq_num=1,
        body=AuthBody(auth_alg=0, auth_seq=1, status_code=0))
    assert not is_connection_request(open_auth, AP)


def test_frame_properties_pull_from_body(ff):
    b = ff.beacon(0, ssid="x", akms=(AKM_SAE,))
    assert b.ssid == "x"
    assert b.rsn.has_sae
    c = ff.commit(0, CLIENT)
    assert c.ssid is None and c.rsn is None


def test_frame_record_is_immutable(ff):
    with pytest.raises(AttributeError):
        ff.beacon(0).ts_us = 1
