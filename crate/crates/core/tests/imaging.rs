use evalkit::embedding::{embed_dataset, read_features_from, write_features_to};
use evalkit::ingest::{save_png, DatasetManifest, Label, ManifestEntry};
use evalkit::transform::{apply_transform, translate};
use evalkit::{load_dataset, Channels, Features, Image, TransformSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn noise(w: usize, h: usize, channels: Channels, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(w, h, channels, |_, _, _| rng.random::<f64>()).unwrap()
}

#[test]
fn halving_averages_two_by_two_blocks() {
    let big = noise(1024, 1024, Channels::Rgb, 1);
    let small = big.resize_bilinear(512, 512).unwrap();
    for y in (0..512).step_by(7) {
        for x in (0..512).step_by(5) {
            for ch in 0..3 {
                let block = big.get(2 * x, 2 * y, ch)
                    + big.get(2 * x + 1, 2 * y, ch)
                    + big.get(2 * x, 2 * y + 1, ch)
                    + big.get(2 * x + 1, 2 * y + 1, ch);
                assert!((small.get(x, y, ch) - block / 4.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn png_round_trip_through_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut entries = Vec::new();
    let mut originals = Vec::new();
    for i in 0..4 {
        let channels = if i % 2 == 0 { Channels::Gray } else { Channels::Rgb };
        let img = noise(16, 16, channels, i).map(|v| (v * 255.0).round() / 255.0);
        let name = format!("img{i}.png");
        save_png(&img, &dir.path().join(&name)).unwrap();
        entries.push(ManifestEntry { path: name.into(), label: if i < 2 { Label::Real } else { Label::Synthetic } });
        originals.push(img);
    }
    let manifest = DatasetManifest::new(dir.path(), entries);
    let loaded: Vec<Image> = load_dataset(&manifest, 16, false).unwrap();
    for (a, b) in originals.iter().zip(&loaded) {
        assert_eq!(b.channels(), Channels::Rgb);
        assert!(a.to_rgb().pixels().iter().zip(b.pixels()).all(|(p, q)| (p - q).abs() < 1e-12));
    }
    let gray: Vec<Image> = load_dataset(&manifest, 8, true).unwrap();
    assert!(gray.iter().all(|g| g.channels() == Channels::Gray && g.width() == 8));

    std::fs::write(dir.path().join("manifest.csv"), "path,label\nimg0.png,real\nimg3.png,synthetic\n").unwrap();
    let read = DatasetManifest::read(dir.path().join("manifest.csv")).unwrap();
    assert_eq!(read.with_label(Label::Synthetic).count(), 1);
    let pair: Vec<Image> = load_dataset(&read, 16, false).unwrap();
    assert_eq!(pair[1].pixels(), loaded[3].pixels());
}

#[test]
fn undecodable_file_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.png"), b"not an image").unwrap();
    let m = DatasetManifest::new(dir.path(), vec![ManifestEntry { path: "bad.png".into(), label: Label::Real }]);
    assert!(matches!(load_dataset::<f64>(&m, 16, true), Err(evalkit::Error::Format(_))));
}

#[test]
fn embedding_is_seeded_and_sized() {
    let images: Vec<Image> = (0..6).map(|s| noise(32, 32, Channels::Rgb, s)).collect();
    let a = embed_dataset(&images, 12, 3).unwrap();
    assert_eq!((a.n(), a.d()), (6, 12));
    assert_eq!(a, embed_dataset(&images, 12, 3).unwrap());
    assert_ne!(a, embed_dataset(&images, 12, 4).unwrap());
    // mid-gray maps to the origin
    let gray = vec![Image::constant(32, 32, Channels::Gray, 0.5).unwrap()];
    assert!(embed_dataset(&gray, 4, 0).unwrap().as_slice().iter().all(|v| *v == 0.0));
    assert!(embed_dataset(&images, 1, 0).is_err());
}

#[test]
fn features_survive_csv() {
    let images: Vec<Image> = (0..3).map(|s| noise(16, 16, Channels::Gray, s)).collect();
    let f = embed_dataset(&images, 5, 1).unwrap();
    let mut buf = Vec::new();
    write_features_to(&f, &mut buf).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("f0,f1,f2,f3,f4\n"));
    let back: Features = read_features_from(buf.as_slice(), "csv").unwrap();
    assert_eq!(back.as_slice(), f.as_slice());
}

proptest! {
    #[test]
    fn resize_keeps_constants_and_range(v in 0.0f64..=1.0, w in 1usize..40, h in 1usize..40) {
        let img = Image::constant(17, 9, Channels::Rgb, v).unwrap();
        let out = img.resize_bilinear(w, h).unwrap();
        prop_assert!(out.pixels().iter().all(|p| (p - v).abs() < 1e-12));
        let n = noise(13, 11, Channels::Gray, (w * 40 + h) as u64).resize_bilinear(w, h).unwrap();
        prop_assert!(n.pixels().iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn translation_round_trips(dx in -20i64..20, dy in -20i64..20, seed in any::<u64>()) {
        let img = noise(8, 8, Channels::Rgb, seed);
        prop_assert_eq!(translate(&translate(&img, dx, dy), -dx, -dy), img.clone());
        let spec = TransformSpec::translation(dx, dy);
        prop_assert_eq!(apply_transform(&img, &spec).unwrap(), translate(&img, dx, dy));
    }

    #[test]
    fn quarter_turns_compose_to_identity(seed in any::<u64>()) {
        let img = noise(8, 8, Channels::Gray, seed);
        let mut cur = img.clone();
        for _ in 0..4 {
            cur = apply_transform(&cur, &TransformSpec::rotation(90.0)).unwrap();
        }
        prop_assert_eq!(cur, img);
    }

    #[test]
    fn gray_of_replicated_rgb_is_identity(seed in any::<u64>()) {
        let img = noise(6, 5, Channels::Gray, seed);
        let back = img.to_rgb().to_gray();
        prop_assert!(img.pixels().iter().zip(back.pixels()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
