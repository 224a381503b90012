use std::io::Cursor;

use chaovid::video_io::{
    read_container, read_ppm, store_plain_frame, write_container, write_ppm, ContainerHeader,
    ContainerReader, ContainerWriter, FrameSource, PlainFormat,
};
use chaovid::{Frame, FrameCipher, Key, MapKind, RgbImage};
use proptest::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_image(rng: &mut impl RngCore, w: usize, h: usize) -> RgbImage {
    let mut data = vec![0u8; w * h * 3];
    rng.fill_bytes(&mut data);
    RgbImage::from_raw(w, h, data).unwrap()
}

fn sample_container(frames: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let key = Key::random(MapKind::Plcm, &mut rng);
    let mut cipher = FrameCipher::new(&key, 2, 2).unwrap();
    let plain: Vec<Frame> = (0..frames)
        .map(|_| Frame::from_image(&random_image(&mut rng, 5, 3), 2).unwrap())
        .collect();
    let enc: Vec<Frame> = plain
        .iter()
        .map(|f| cipher.encrypt_next(f).unwrap())
        .collect();
    let header = ContainerHeader::for_frame(&enc[0], MapKind::Plcm, 2, 2, 24).unwrap();
    let mut out = Vec::new();
    write_container(&mut out, &header, &enc).unwrap();
    out
}

#[test]
fn container_round_trip_and_determinism() {
    let bytes = sample_container(3);
    assert_eq!(bytes, sample_container(3));
    assert_eq!(&bytes[..4], b"CVE1");
    let (header, frames) = read_container(Cursor::new(&bytes)).unwrap();
    assert_eq!(header.frame_count, 3);
    assert_eq!(
        (header.side, header.orig_width, header.orig_height),
        (6, 5, 3)
    );
    assert_eq!((header.workers, header.rounds, header.fps), (2, 2, 24));
    assert_eq!(frames.len(), 3);
    assert_eq!(bytes.len(), 27 + 3 * 6 * 6 * 3);
    header.check_context(MapKind::Plcm, 2, 2).unwrap();
    assert!(header.check_context(MapKind::Plcm, 3, 2).is_err());
    assert!(header.check_context(MapKind::Lasm, 2, 2).is_err());
}

#[test]
fn streaming_writer_patches_frame_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let frame = Frame::from_image(&random_image(&mut rng, 4, 4), 1).unwrap();
    let header = ContainerHeader::for_frame(&frame, MapKind::Lasm, 1, 1, 30).unwrap();
    let mut writer = ContainerWriter::new(Cursor::new(Vec::new()), header).unwrap();
    for _ in 0..5 {
        writer.write_frame(&frame).unwrap();
    }
    let bytes = writer.finish().unwrap().into_inner();
    let mut reader = ContainerReader::new(Cursor::new(bytes)).unwrap();
    assert_eq!(reader.header().frame_count, 5);
    let mut n = 0;
    while let Some(f) = reader.next_frame().unwrap() {
        assert_eq!(f.pixels(), frame.pixels());
        n += 1;
    }
    assert_eq!(n, 5);
}

#[test]
fn truncated_container_is_an_error() {
    let bytes = sample_container(2);
    for cut in [0, 3, 26, 27, 40, bytes.len() - 1] {
        assert!(
            read_container(Cursor::new(&bytes[..cut])).is_err(),
            "cut at {cut}"
        );
    }
}

proptest! {
    #[test]
    fn container_fuzz_never_panics(flips in prop::collection::vec((0usize..300, any::<u8>()), 0..8), cut in 0usize..400) {
        let mut bytes = sample_container(2);
        for (pos, v) in flips {
            if pos < bytes.len() {
                bytes[pos] ^= v;
            }
        }
        bytes.truncate(cut.min(bytes.len()));
        let _ = read_container(Cursor::new(&bytes));
    }

    #[test]
    fn ppm_fuzz_never_panics(data in prop::collection::vec(any::<u8>(), 0..64)) {
        let mut bytes = b"P6\n2 2\n255\n".to_vec();
        bytes.extend(&data);
        let _ = read_ppm(&mut Cursor::new(bytes));
        let _ = read_ppm(&mut Cursor::new(data));
    }
}

#[test]
fn ppm_store_and_reload() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let image = random_image(&mut rng, 7, 5);
    let mut bytes = Vec::new();
    write_ppm(&mut bytes, &image).unwrap();
    assert!(bytes.starts_with(b"P6\n7 5\n255\n"));
    assert_eq!(read_ppm(&mut Cursor::new(bytes)).unwrap(), image);
}

#[test]
fn padding_is_zero_and_cropped_away() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let image = random_image(&mut rng, 7, 5);
    let frame = Frame::from_image(&image, 4).unwrap();
    assert_eq!(frame.side(), 8);
    for y in 0..8 {
        for x in 0..8 {
            let expected = if x < 7 && y < 5 {
                image.pixel(x, y)
            } else {
                [0; 3]
            };
            assert_eq!(frame.image().pixel(x, y), expected);
        }
    }
    assert_eq!(frame.cropped(), image);

    // Encrypting a padded frame and decrypting it gives the unpadded image back.
    let key = Key::random(MapKind::Lasm, &mut rng);
    let c = FrameCipher::new(&key, 4, 2)
        .unwrap()
        .encrypt_next(&frame)
        .unwrap();
    let back = FrameCipher::new(&key, 4, 2)
        .unwrap()
        .decrypt_next(&c)
        .unwrap();
    let mut raw = Vec::new();
    store_plain_frame(&back, &mut raw, PlainFormat::Raw).unwrap();
    assert_eq!(raw, image.data());
}

#[test]
fn raw_source_reads_whole_frames_only() {
    let data: Vec<u8> = (0..(2 * 4 * 3 * 3 + 5)).map(|i| i as u8).collect();
    let mut src = FrameSource::raw(Cursor::new(data), 4, 3, 24).unwrap();
    assert!(src.load_frame(1).is_ok());
    assert!(src.load_frame(1).is_ok());
    assert!(src.load_frame(1).is_err());
}
