//! Starts the session service on a free local port and drives it with a
//! scripted client: draw a square, set rotation, scale and centroid, commit,
//! then follow the state stream until the swarm is done.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;

use hsi_core::harness::{ClientMessage, Scenario, Server, ServerMessage, ServerOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::from_json(
        r#"{"agents": 20,
            "initial": {"formation": {"shape": [[0,0],[1,0],[1,1],[0,1]], "scale": 4.0}},
            "goal": {"shape": [[0,0],[1,0],[1,1],[0,1]]}}"#,
    )?;
    let server = Server::bind("127.0.0.1:0", ServerOptions { scenario, cadence: 50 })?;
    let addr = server.local_addr()?;
    std::thread::spawn(move || server.run());

    let mut stream = TcpStream::connect(addr)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let script = [
        ClientMessage::AddVertex { x: 0.0, y: 0.0 },
        ClientMessage::AddVertex { x: 1.0, y: 0.0 },
        ClientMessage::AddVertex { x: 1.0, y: 1.0 },
        ClientMessage::AddVertex { x: 0.0, y: 1.0 },
        ClientMessage::SetRotation { rad: 45f64.to_radians() },
        ClientMessage::SetScale { s: 2.0 },
        ClientMessage::SetCentroid { x: 15.0, y: 10.0 },
        ClientMessage::Commit,
    ];
    for msg in &script {
        writeln!(stream, "{}", serde_json::to_string(msg)?)?;
    }

    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        match serde_json::from_str::<ServerMessage>(&line)? {
            ServerMessage::Ack => {}
            ServerMessage::PlanPreview { shapes, modes } => println!("plan preview: {} subgoals, modes {modes:?}", shapes.len()),
            ServerMessage::StateUpdate { t, e_f, e_c, segment, .. } => {
                println!("segment {segment} t = {t:>4}  e_f = {e_f:.3e}  e_c = {e_c:.3e}")
            }
            ServerMessage::Done => {
                println!("done");
                break;
            }
            ServerMessage::Error { msg } => return Err(msg.into()),
        }
    }
    Ok(())
}
